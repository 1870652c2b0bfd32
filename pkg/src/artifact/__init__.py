"""Finite-model A-infinity structures from disk correlators, with checkers and a generator."""

__version__ = "0.1.0"
