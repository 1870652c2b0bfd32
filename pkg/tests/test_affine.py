from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.affine import Affine, LinearSystem, substitute


def test_affine_arithmetic():
    p, q = Affine.param(0), Affine.param(1)
    e = p * 2 + q - 3
    assert e.evaluate({0: 1, 1: 1}) == 0
    assert (e - e) == 0
    assert not (e - e)
    assert (Affine(2) * p) == p * 2
    with pytest.raises(TypeError):
        p * q
    assert substitute(Fraction(1, 2), {}) == Fraction(1, 2)


def test_inconsistent_system_detected():
    s = LinearSystem()
    p = Affine.param(0)
    assert s.add(p - 1)
    assert not s.add(p - 2, "clash")
    assert s.inconsistent == ["clash"] and not s.ok


coef = st.integers(-3, 3)


@given(st.lists(st.lists(coef, min_size=3, max_size=3), max_size=4), st.lists(coef, min_size=3, max_size=3))
def test_solution_satisfies_consistent_equations(rows, x0):
    # equations built to vanish at x0 are always consistent; the solve must satisfy them
    s = LinearSystem()
    exprs = []
    for r in rows:
        e = Affine(-sum(a * b for a, b in zip(r, x0)), dict(enumerate(r)))
        exprs.append(e)
        assert s.add(e)
    vals = s.solve(range(3), lambda i: i + 7)
    for e in exprs:
        assert e.evaluate(vals) == 0
