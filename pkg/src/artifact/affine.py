"""Affine expressions in rational parameters and exact sparse linear solving."""

from __future__ import annotations

from fractions import Fraction


class Affine:
    """const + sum coeff * p_i, closed under addition and rational scaling."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const=0, coeffs=None):
        self.const = Fraction(const)
        self.coeffs = {i: Fraction(c) for i, c in (coeffs or {}).items() if c}

    @classmethod
    def param(cls, i: int) -> "Affine":
        return cls(0, {i: 1})

    def _lift(self, other):
        if isinstance(other, Affine):
            return other
        if isinstance(other, (int, Fraction)):
            return Affine(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        coeffs = dict(self.coeffs)
        for i, c in other.coeffs.items():
            v = coeffs.get(i, 0) + c
            if v:
                coeffs[i] = v
            else:
                coeffs.pop(i, None)
        out = Affine.__new__(Affine)
        out.const = self.const + other.const
        out.coeffs = coeffs
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Affine):
            if other.coeffs and self.coeffs:
                raise TypeError("product of two non-constant affine expressions")
            if not other.coeffs:
                other = other.const
            else:
                return other * self.const
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        out = Affine.__new__(Affine)
        out.const = self.const * other
        out.coeffs = {i: c * other for i, c in self.coeffs.items()} if other else {}
        return out

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.const) or bool(self.coeffs)

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.const == other.const and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.const, frozenset(self.coeffs.items())))

    def evaluate(self, values: dict) -> Fraction:
        return self.const + sum((c * values.get(i, 0) for i, c in self.coeffs.items()), Fraction(0))

    def __repr__(self):
        parts = [str(self.const)] if self.const else []
        parts += [f"{c}*p{i}" for i, c in sorted(self.coeffs.items())]
        return " + ".join(parts) or "0"


def substitute(value, values: dict):
    if isinstance(value, Affine):
        return value.evaluate(values)
    return value


class LinearSystem:
    """Equations expr == 0 on affine expressions, reduced incrementally to echelon form."""

    def __init__(self):
        self.pivots: dict[int, Affine] = {}  # pivot parameter -> row with coefficient 1 on it
        self.inconsistent: list = []

    def reduce(self, expr: Affine) -> Affine:
        expr = Affine(expr.const, expr.coeffs)
        changed = True
        while changed:
            changed = False
            for p in [i for i in expr.coeffs if i in self.pivots]:
                c = expr.coeffs.get(p)
                if c:
                    expr = expr - self.pivots[p] * c
                    changed = True
        return expr

    def add(self, expr, witness=None) -> bool:
        """Add expr == 0; returns False when it contradicts the earlier equations."""
        if not isinstance(expr, Affine):
            expr = Affine(expr)
        expr = self.reduce(expr)
        if not expr.coeffs:
            if expr.const:
                self.inconsistent.append(witness)
                return False
            return True
        p = min(expr.coeffs)
        row = expr * (1 / expr.coeffs[p])
        for q, other in self.pivots.items():
            c = other.coeffs.get(p)
            if c:
                self.pivots[q] = other - row * c
        self.pivots[p] = row
        return True

    @property
    def ok(self) -> bool:
        return not self.inconsistent

    def solve(self, params, choose) -> dict:
        """Assign free parameters with choose(i) and solve for the pivots."""
        values = {i: Fraction(choose(i)) for i in params if i not in self.pivots}
        for p, row in self.pivots.items():
            rest = Affine(row.const, {i: c for i, c in row.coeffs.items() if i != p})
            values[p] = -rest.evaluate(values)
        return values
