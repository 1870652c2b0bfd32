from fractions import Fraction
from itertools import product

import pytest

from artifact.dgmodel import (CDGAModel, CElement, check_model, circle_model, pairing, point_pair,
                              projective_plane_padded, retract, torus_model, torus_model_padded, wedge)
from artifact.novikov import DegreeLattice
from artifact.qops import make_context

MODELS = [circle_model, torus_model, torus_model_padded, projective_plane_padded]


@pytest.mark.parametrize("make", MODELS)
def test_stock_models_pass_all_checks(make):
    rep = check_model(make())
    assert rep.ok, rep.render()


def test_duplicate_name_and_bad_degree_rejected():
    with pytest.raises(ValueError):
        CDGAModel(1, [("1", 0), ("1", 1)], 0)
    with pytest.raises(ValueError):
        CDGAModel(1, [("1", 0), ("x", 2)], 0)
    with pytest.raises(ValueError):
        CDGAModel(1, [("x", 1), ("1", 0)], 0)


def test_broken_model_reported():
    m = CDGAModel(2, [("1", 0), ("a", 1), ("b", 2)], 0, differential={1: {2: 1}}, integral={2: 1})
    rep = check_model(m)
    assert "Stokes" in rep.failed_names()


def test_retract_identities_on_padded_models():
    for make in (torus_model_padded, projective_plane_padded):
        m = make()
        h, p, harm = retract(m.degrees, m.d)
        dim = m.dim
        assert len(harm) == sum(1 for i in range(dim) if m.apply_p({i: 1}) == {i: Fraction(1)})


def test_pairing_graded_antisymmetry():
    m = torus_model()
    for i, j in product(range(m.dim), repeat=2):
        s = -1 if ((m.degrees[i] + 1) * (m.degrees[j] + 1) + 1) % 2 else 1
        assert m.pair_basis(i, j) == s * m.pair_basis(j, i)
    assert m.pair_basis(m.by_name("th1"), m.by_name("th2")) == -1


def test_celement_wedge_and_pairing():
    m = torus_model()
    ctx = make_context(DegreeLattice.from_pairs([(1, 2)]), [0], 2)
    a = CElement(m, ctx, {m.by_name("th1"): ctx.t(0)})
    b = CElement(m, ctx, {m.by_name("th2"): 2})
    ab = wedge(a, b)
    assert ab.coeffs == {m.by_name("vol"): ctx.t(0).scale(2)}
    assert wedge(b, a) == -ab
    assert pairing(a, b) == ctx.t(0).scale(-2)
    assert a.degrees() == {1}
    assert a.valuation() == 1
    assert (a - a).is_zero()


def test_point_pair_checks():
    pair = point_pair(projective_plane_padded(), torus_model_padded(), [{1: 1}])
    assert pair.check().ok
    assert pair.divisor_basis == (1, 4)
    assert pair.basis_period((2,), 1) == 2
    assert pair.basis_period((1,), 4) == 0
    with pytest.raises(ValueError):
        pair.period((1,), {3: 1})
