"""Sign calculus and partition combinatorics for the q-operators.

Every function returns a :class:`Parity`; the exponent of -1 is what matters,
so signs are never multiplied as numbers until the final evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence


class Parity(int):
    """An element of Z/2, stored as 0 or 1."""

    def __new__(cls, value: int = 0):
        return super().__new__(cls, value & 1)

    def __add__(self, other):
        return Parity(int(self) + int(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Parity(int(self) + int(other))

    def __neg__(self):
        return self

    def __mul__(self, other):
        return Parity(int(self) * int(other))

    __rmul__ = __mul__

    @property
    def sign(self) -> int:
        return -1 if self else 1

    def __repr__(self):
        return f"Parity({int(self)})"


@dataclass(frozen=True)
class Partition3:
    """Ordered cut of [k] into a prefix, a middle block and a suffix."""

    k: int
    i1: int
    i2: int

    def __post_init__(self):
        if self.i1 < 0 or self.i2 < 0 or self.i1 + self.i2 > self.k:
            raise ValueError(f"bad partition {self}")

    @property
    def first(self) -> tuple[int, ...]:
        return tuple(range(self.i1))

    @property
    def middle(self) -> tuple[int, ...]:
        return tuple(range(self.i1, self.i1 + self.i2))

    @property
    def last(self) -> tuple[int, ...]:
        return tuple(range(self.i1 + self.i2, self.k))

    @property
    def outer_arity(self) -> int:
        return self.k - self.i2 + 1


@dataclass(frozen=True)
class SplitIJ:
    """Complementary ordered sublists I, J of range(l)."""

    l: int
    I: tuple[int, ...]
    J: tuple[int, ...]

    def __post_init__(self):
        if tuple(sorted(self.I + self.J)) != tuple(range(self.l)):
            raise ValueError(f"not a split of range({self.l}): {self}")
        if tuple(sorted(self.I)) != self.I or tuple(sorted(self.J)) != self.J:
            raise ValueError("split blocks must be increasing")


def enumerate_partitions(k: int) -> list[Partition3]:
    return [Partition3(k, i1, i2) for i1 in range(k + 1) for i2 in range(k - i1 + 1)]


def enumerate_splits(l: int) -> list[SplitIJ]:
    out = []
    full = range(l)
    for size in range(l + 1):
        for I in combinations(full, size):
            J = tuple(j for j in full if j not in I)
            out.append(SplitIJ(l, I, J))
    return out


def koszul_sign(split: SplitIJ, degs: Sequence[int]) -> Parity:
    """Sign of the shuffle taking (gamma^I, gamma^J) back to gamma."""
    if len(degs) != split.l:
        raise ValueError("degree list does not match split size")
    total = 0
    for i in split.I:
        if degs[i] & 1:
            for j in split.J:
                if j < i:
                    total += degs[j]
    return Parity(total)


def permutation_sign(perm: Sequence[int], degs: Sequence[int]) -> Parity:
    """Koszul sign of reordering graded symbols: entry p of the result is degs[perm[p]]."""
    total = 0
    m = len(perm)
    for a in range(m):
        for b in range(a + 1, m):
            if perm[a] > perm[b]:
                total += degs[perm[a]] * degs[perm[b]]
    return Parity(total)


def epsilon(alpha_degs: Sequence[int], gamma_degs: Sequence[int], n: int, k: int | None = None) -> Parity:
    """Sign relating push-forward values to q-values.

    ``k`` defaults to the number of boundary inputs; pass ``k=-1`` for the
    scalar operators with no output point.
    """
    if k is None:
        k = len(alpha_degs)
    total = sum((j + 1) * (a + 1) for j, a in enumerate(alpha_degs))
    total += sum(gamma_degs) + k * n + 1
    return Parity(total)


def iota(alpha_degs: Sequence[int], gamma_degs: Sequence[int], partition: Partition3, split: SplitIJ) -> Parity:
    prefix = sum(alpha_degs[j] + 1 for j in partition.first)
    gJ = sum(gamma_degs[j] for j in split.J)
    gI = sum(gamma_degs[j] for j in split.I)
    return Parity(gJ * prefix + prefix + gI) + koszul_sign(split, gamma_degs)


def delta_glue(k1: int, k2: int, i: int, n: int) -> Parity:
    return Parity(k2 * (k1 - i) + i - n)


def cyclic_sign(degs: Sequence[int]) -> Parity:
    """Sign for rotating the last of k+1 inputs to the front of a cyclic pairing."""
    *head, last = degs
    return Parity((last + 1) * sum(d + 1 for d in head))


def pairing_swap_sign(deg_x: int, deg_y: int) -> Parity:
    """<x, y> = (-1)^s <y, x>."""
    return Parity((deg_x + 1) * (deg_y + 1) + 1)


def shifted_prefix(degs: Sequence[int], upto: int) -> Parity:
    """Sum of (deg + 1) over the first ``upto`` entries."""
    return Parity(sum(d + 1 for d in degs[:upto]))


def isotopy_nu(degs: Sequence[int], k2: int, i: int) -> Parity:
    """Sign in the pairing form of the interval A-infinity relations.

    ``degs`` holds the k+1 degrees, ``i`` is the 1-based start of the inner block.
    """
    total = sum(d + 1 for d in degs[: i - 1])
    shifted = [d + 1 for d in degs]
    whole = sum(shifted)
    for j in range(i + k2, len(degs) + 1):
        s = shifted[j - 1]
        total += s * (whole - s + 1)
    return Parity(total + 1)
