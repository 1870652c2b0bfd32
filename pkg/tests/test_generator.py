from fractions import Fraction

from artifact.dgmodel import point_pair, projective_plane_padded, torus_model_padded
from artifact.generator import Generator, GeneratorOptions, generate
from artifact.novikov import DegreeLattice
from artifact.qops import check_axioms_on_data, check_q_minus1_relations, check_q_relations
from conftest import torus_contraction, torus_generation, torus_pair


def test_torus_generation_closes(torus_result):
    assert torus_result.report.ok, torus_result.report.render()
    data = torus_result.data
    assert data.coefficient_count() > 1000
    # independent re-check of the stored data
    assert check_q_relations(data).ok
    assert check_q_minus1_relations(data).ok
    assert check_axioms_on_data(data).ok
    assert torus_result.report.checks["solve: obstruction is closed"].total > 0


def test_generation_is_deterministic(torus_data):
    again = torus_generation()
    assert again.data.disk == torus_data.disk
    other = torus_generation(seed=4)
    assert other.data.disk != torus_data.disk


def test_solve_order():
    res = torus_generation(exact_noise=False)
    lat = res.data.lattice
    keys = [(lat.omega(b), k == -1, k + 2 * l) for b, k, l in res.order]
    assert keys == sorted(keys)
    assert len(set(res.order)) == len(res.order)


def test_provenance(torus_result):
    prov = torus_result.provenance
    assert prov["seed"] == 3
    assert prov["order"][0] == [[1], 0, 0]
    assert prov["options"]["contractions"] == [{"th1": {"1": "1"}, "th2": {}, "vol": {"th2": "1"}}]
    assert prov["options"]["exact_noise"] is True


def test_zero_lattice_gives_energy_zero_data():
    pair = point_pair(projective_plane_padded(), torus_model_padded(), [])
    res = generate(pair, DegreeLattice.from_pairs([]), 2, 3, 2, GeneratorOptions(seed=1))
    assert res.report.ok
    assert res.data.coefficient_count() == 0


def test_corrupted_lower_slot_is_reported():
    lat = DegreeLattice.from_pairs([(1, 2)])
    gen = Generator(torus_pair(), lat, 2, 3, 2,
                    GeneratorOptions(seed=3, exact_noise=False, contractions=[torus_contraction(1, 0)]))
    gen.solve_beta((1,))
    slot = ((1,), 1, 0)
    entries = dict(gen.view.get(slot))
    entries[((2,), ())] = {0: Fraction(1)}
    gen.view.set_slot(slot, entries)
    gen.solve_beta((2,))
    closed = gen.report.checks["obstruction is closed"]
    assert closed.failures
    assert all(w["slot"][0] == (2,) for w in closed.failures)
