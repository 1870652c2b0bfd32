import random
from itertools import product as cartesian

import pytest

from artifact.dgmodel import CElement, RelativePairModel, circle_model, torus_model, torus_model_padded
from artifact.novikov import DegreeLattice
from artifact.qops import (CorrelatorData, DataError, ainfty_residual, ainfty_residual_bruteforce, build_m, check_ainfty,
                           check_axioms_on_data, check_cyclic_unital, check_q_minus1_relations, check_q_relations,
                           check_thm_prop, eval_q_basis, make_context)
from conftest import bulk_t, energy_zero_data, torus_generation
from instances import random_instance


@pytest.mark.parametrize("lmodel", [circle_model(), torus_model(), torus_model_padded()], ids=["circle", "torus", "torus_padded"])
def test_energy_zero_operators_are_the_dg_structure(lmodel):
    data = energy_zero_data(lmodel)
    ctx = make_context(data.lattice, [], 1)
    m = build_m(data, CElement(data.X, ctx, {}))
    for a in cartesian(range(lmodel.dim), repeat=1):
        assert {o: c.reduce() for o, c in m.value(a).items()} == lmodel.d.get(a[0], {})
    for i, j in cartesian(range(lmodel.dim), repeat=2):
        s = -1 if lmodel.degrees[i] % 2 else 1
        want = {o: s * c for o, c in lmodel.mul_basis(i, j).items()}
        assert {o: c.reduce() for o, c in m.value((i, j)).items()} == want
    for k in (0, 3, 4):
        assert not m.table(k)
    assert check_ainfty(m).ok
    assert check_cyclic_unital(m).ok
    assert check_q_relations(data).ok and check_axioms_on_data(data).ok


def test_store_rejections():
    L = torus_model()
    lat = DegreeLattice.from_pairs([(1, 2)])
    pair = RelativePairModel(L, L, {i: {i: 1} for i in range(L.dim)}, [], [{}])
    make = lambda disk: CorrelatorData(pair, lat, 2, 3, 0, disk)
    # q^beta_{1,0}(th1): degree 1 + 0 - 2 - 1 + 2 = 0, so the output must be the unit, not th2
    with pytest.raises(DataError, match=r"slot .*degree law violated at \(th1\);\(\)"):
        make({((1,), 1, 0): {((1,), ()): {2: 1}}})
    assert make({((1,), 1, 0): {((1,), ()): {0: 1}}}).coefficient_count() == 1
    with pytest.raises(DataError, match="outside the truncation box"):
        make({((1,), 4, 0): {((1, 1, 1, 1), ()): {0: 1}}})
    with pytest.raises(DataError, match="energy-zero"):
        make({((0,), 1, 0): {((1,), ()): {1: 1}}})
    with pytest.raises(DataError, match="outside the truncation box"):
        make({((3,), 1, 0): {((1,), ()): {0: 1}}})


def test_residuals_match_bruteforce_on_random_instances():
    rng = random.Random(11)
    for _ in range(20):
        m = random_instance(rng)
        for k in range(5):
            assert ainfty_residual(m, k) == ainfty_residual_bruteforce(m, k)


def test_generated_torus_data_is_consistent(torus_data):
    assert check_q_relations(torus_data).ok
    assert check_q_minus1_relations(torus_data).ok
    assert check_axioms_on_data(torus_data).ok
    ctx, gamma = bulk_t(torus_data)
    m = build_m(torus_data, gamma)
    assert check_ainfty(m).ok
    assert check_cyclic_unital(m).ok


def test_divisor_axiom_on_generated_values(torus_data):
    X = torus_data.X
    om = X.by_name("om")
    beta = (1,)
    per = torus_data.pair.basis_period(beta, om)
    for a in cartesian(range(torus_data.L.dim), repeat=1):
        small = eval_q_basis(torus_data, beta, 1, 0, a, ())
        big = eval_q_basis(torus_data, beta, 1, 1, a, (om,))
        assert big == {o: per * c for o, c in small.items() if per * c}


def test_single_coefficient_change_is_detected():
    data = torus_generation(exact_noise=False).data
    slot = next(s for s in sorted(data.disk) if s[1] == 2 and s[2] == 0)
    key, vec = sorted(data.disk[slot].items())[0]
    o = min(vec)
    disk = {s: dict(e) for s, e in data.disk.items()}
    disk[slot][key] = {**vec, o: vec[o] + 1}
    bad = data.replace(disk=disk)
    assert not (check_q_relations(bad).ok and check_axioms_on_data(bad).ok)


def test_derivative_laws(torus_data):
    X = torus_data.X
    ctx = make_context(torus_data.lattice, [2, 0, 0], torus_data.cutoff)
    gamma = CElement(X, ctx, {X.unit: ctx.t(0), X.by_name("om"): ctx.t(1) + ctx.t(2, 2), X.by_name("b"): ctx.t(2)})
    m = build_m(torus_data, gamma)
    rep = check_thm_prop(m, torus_data, gamma, 0, 1, {X.by_name("om"): 1})
    assert rep.ok, rep.render()
    assert check_ainfty(m).ok


def test_derivative_laws_reject_T_in_bulk(torus_data):
    X = torus_data.X
    ctx = make_context(torus_data.lattice, [2, 0], torus_data.cutoff)
    gamma = CElement(X, ctx, {X.unit: ctx.t(0), X.by_name("om"): ctx.t(1) + ctx.monomial(beta=(1,), t=(0, 1))})
    m = build_m(torus_data, CElement(X, ctx, {X.unit: ctx.t(0), X.by_name("om"): ctx.t(1)}))
    with pytest.raises(ValueError, match="free of T"):
        check_thm_prop(m, torus_data, gamma, 0, 1, {X.by_name("om"): 1})


def test_bulk_preconditions(torus_data):
    X = torus_data.X
    ctx = make_context(torus_data.lattice, [0], torus_data.cutoff)
    with pytest.raises(ValueError, match="closed"):
        build_m(torus_data, CElement(X, ctx, {X.by_name("c"): ctx.t(0)}))
    with pytest.raises(ValueError, match="degree 2"):
        build_m(torus_data, CElement(X, ctx, {X.by_name("om2"): ctx.t(0)}))
    with pytest.raises(ValueError, match="valuation"):
        build_m(torus_data, CElement(X, ctx, {X.by_name("om"): ctx.one()}))
