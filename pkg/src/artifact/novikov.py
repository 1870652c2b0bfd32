"""Coefficient ring: truncated series in T^beta and even-degree formal variables."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

Beta = tuple[int, ...]
Key = tuple[Beta, tuple[int, ...]]


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeLattice:
    """Free monoid on generators, each carrying an energy and an even Maslov index."""

    energies: tuple[Fraction, ...]
    maslov: tuple[int, ...]

    def __post_init__(self):
        if len(self.energies) != len(self.maslov):
            raise ValueError("energies and maslov indices differ in length")
        for w in self.energies:
            if Fraction(w) <= 0:
                raise ValueError("generator energies must be positive")
        for m in self.maslov:
            if m % 2:
                raise ValueError("maslov indices must be even")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "DegreeLattice":
        pairs = list(pairs)
        return cls(tuple(Fraction(w) for w, _ in pairs), tuple(int(m) for _, m in pairs))

    @property
    def rank(self) -> int:
        return len(self.energies)

    @property
    def zero(self) -> Beta:
        return (0,) * self.rank

    def omega(self, beta: Beta) -> Fraction:
        return sum((b * w for b, w in zip(beta, self.energies)), Fraction(0))

    def mu(self, beta: Beta) -> int:
        return sum(b * m for b, m in zip(beta, self.maslov))

    def add(self, b1: Beta, b2: Beta) -> Beta:
        return tuple(x + y for x, y in zip(b1, b2))

    def check(self, beta: Sequence[int]) -> Beta:
        beta = tuple(int(b) for b in beta)
        if len(beta) != self.rank or any(b < 0 for b in beta):
            raise ValueError(f"{beta} is not a lattice element")
        return beta

    def elements(self, cutoff) -> list[Beta]:
        """All beta with omega(beta) <= cutoff, sorted by (omega, beta)."""
        cutoff = Fraction(cutoff)
        bounds = [int(cutoff // w) for w in self.energies]
        found = [b for b in product(*(range(m + 1) for m in bounds)) if self.omega(b) <= cutoff]
        return sorted(found, key=lambda b: (self.omega(b), b))

    def decompositions(self, beta: Beta) -> Iterator[tuple[Beta, Beta]]:
        for b1 in product(*(range(b + 1) for b in beta)):
            yield b1, tuple(b - x for b, x in zip(beta, b1))


@dataclass(frozen=True)
class FormalVariableSpec:
    degrees: tuple[int, ...]

    def __post_init__(self):
        for d in self.degrees:
            if d % 2:
                raise ValueError("formal variables must have even degree")

    @property
    def count(self) -> int:
        return len(self.degrees)


@dataclass(frozen=True)
class RingContext:
    lattice: DegreeLattice
    variables: FormalVariableSpec
    cutoff: Fraction

    def __post_init__(self):
        object.__setattr__(self, "cutoff", Fraction(self.cutoff))

    def key_valuation(self, key: Key) -> Fraction:
        beta, t = key
        return self.lattice.omega(beta) + sum(t)

    def key_grade(self, key: Key) -> int:
        beta, t = key
        return self.lattice.mu(beta) + sum(e * d for e, d in zip(t, self.variables.degrees))

    def zero_key(self) -> Key:
        return (self.lattice.zero, (0,) * self.variables.count)

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def one(self) -> "RingElement":
        return RingElement(self, {self.zero_key(): Fraction(1)})

    def constant(self, c) -> "RingElement":
        return RingElement(self, {self.zero_key(): Fraction(c)})

    def monomial(self, beta=None, t=None, coeff=1) -> "RingElement":
        beta = self.lattice.zero if beta is None else self.lattice.check(beta)
        t = (0,) * self.variables.count if t is None else tuple(int(x) for x in t)
        if len(t) != self.variables.count or any(x < 0 for x in t):
            raise ValueError(f"bad t-exponent {t}")
        return RingElement(self, {(beta, t): Fraction(coeff)})

    def T(self, beta) -> "RingElement":
        return self.monomial(beta=beta)

    def t(self, a: int, power: int = 1) -> "RingElement":
        exps = [0] * self.variables.count
        exps[a] = power
        return self.monomial(t=exps)


INFINITY = float("inf")


class RingElement:
    """Finite sum of rational multiples of T^beta t^l below the cutoff."""

    __slots__ = ("ctx", "terms", "truncated")

    def __init__(self, ctx: RingContext, terms: dict, truncated: bool = False):
        self.ctx = ctx
        kept = {}
        for key, c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            if ctx.key_valuation(key) > ctx.cutoff:
                truncated = True
                continue
            kept[key] = c
        self.terms = kept
        self.truncated = truncated

    def _same(self, other: "RingElement"):
        if other.ctx != self.ctx:
            raise ContextError("ring elements live in different contexts")

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0) + c
        return RingElement(self.ctx, terms, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ctx, {k: -c for k, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "RingElement":
        c = Fraction(c)
        return RingElement(self.ctx, {k: v * c for k, v in self.terms.items()}, self.truncated)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        cut = ctx.cutoff
        terms: dict = {}
        truncated = self.truncated or other.truncated
        for (b1, t1), c1 in self.terms.items():
            v1 = ctx.key_valuation((b1, t1))
            for (b2, t2), c2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(b1, b2)), tuple(x + y for x, y in zip(t1, t2)))
                if v1 + ctx.key_valuation((b2, t2)) > cut:
                    truncated = True
                    continue
                terms[key] = terms.get(key, 0) + c1 * c2
        return RingElement(ctx, terms, truncated)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.constant(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def tderiv(self, a: int) -> "RingElement":
        if not 0 <= a < self.ctx.variables.count:
            raise IndexError(f"no formal variable t_{a}")
        terms = {}
        for (beta, t), c in self.terms.items():
            if t[a]:
                nt = t[:a] + (t[a] - 1,) + t[a + 1:]
                terms[(beta, nt)] = c * t[a]
        return RingElement(self.ctx, terms, self.truncated)

    def valuation(self):
        if not self.terms:
            return INFINITY
        return min(self.ctx.key_valuation(k) for k in self.terms)

    def grades(self) -> set[int]:
        return {self.ctx.key_grade(k) for k in self.terms}

    def grade(self) -> int | None:
        """The common grade of a homogeneous element, None for zero."""
        g = self.grades()
        if len(g) > 1:
            raise ValueError("element is not homogeneous")
        return next(iter(g)) if g else None

    def reduce(self) -> Fraction:
        """Image modulo the ideal of positive valuation."""
        return self.terms.get(self.ctx.zero_key(), Fraction(0))

    def beta_part(self, beta: Beta) -> "RingElement":
        return RingElement(self.ctx, {k: c for k, c in self.terms.items() if k[0] == beta}, self.truncated)

    def truncate(self, cutoff) -> "RingElement":
        cutoff = Fraction(cutoff)
        return RingElement(
            self.ctx,
            {k: c for k, c in self.terms.items() if self.ctx.key_valuation(k) <= cutoff},
            self.truncated,
        )

    def to_records(self) -> list[dict]:
        return [
            {"beta": list(b), "t": list(t), "coeff": format_fraction(c)}
            for (b, t), c in sorted(self.terms.items())
        ]

    @classmethod
    def from_records(cls, ctx: RingContext, records) -> "RingElement":
        out = ctx.zero()
        for rec in records:
            out = out + ctx.monomial(rec["beta"], rec["t"], parse_fraction(rec["coeff"]))
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (b, t), c in sorted(self.terms.items()):
            mono = []
            if any(b):
                mono.append("T^" + ",".join(map(str, b)))
            for a, e in enumerate(t):
                if e:
                    mono.append(f"t{a}^{e}" if e > 1 else f"t{a}")
            parts.append(f"{c}" + ("*" + "*".join(mono) if mono else ""))
        return " + ".join(parts)


def ring_add(x: RingElement, y: RingElement) -> RingElement:
    return x + y


def ring_mul(x: RingElement, y: RingElement) -> RingElement:
    return x * y


def ring_tderiv(x: RingElement, a: int) -> RingElement:
    return x.tderiv(a)


def valuation(x: RingElement):
    return x.valuation()


def parse_fraction(text) -> Fraction:
    """Parse "p/q" or an integer; floats are refused."""
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"expected a 'p/q' string, got {type(text).__name__}")
    s = text.strip()
    if any(ch in s for ch in ".eE"):
        raise ValueError(f"floating point literal {text!r} refused")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {text!r}") from exc


def format_fraction(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
