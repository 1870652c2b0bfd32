from fractions import Fraction

import pytest

from artifact.dgmodel import (CElement, RelativePairModel, circle_contraction, circle_model, point_pair,
                              projective_plane_padded, torus_contraction, torus_model_padded)
from artifact.generator import GeneratorOptions, generate
from artifact.novikov import DegreeLattice
from artifact.qops import CorrelatorData, make_context


def energy_zero_data(lmodel, kmax=4):
    lat = DegreeLattice.from_pairs([])
    pair = RelativePairModel(lmodel, lmodel, {i: {i: 1} for i in range(lmodel.dim)}, [], [])
    return CorrelatorData(pair, lat, 1, kmax, 0)


def torus_pair():
    return point_pair(projective_plane_padded(), torus_model_padded(), [{1: 1}])


def torus_generation(seed=3, exact_noise=True):
    lat = DegreeLattice.from_pairs([(1, 2)])
    opts = GeneratorOptions(seed=seed, exact_noise=exact_noise, contractions=[torus_contraction(1, 0)])
    return generate(torus_pair(), lat, 2, 3, 2, opts)


def circle_generation(seed=1):
    lat = DegreeLattice.from_pairs([(1, 2)])
    pair = point_pair(projective_plane_padded(), circle_model(), [{1: 1}])
    return generate(pair, lat, 2, 3, 2, GeneratorOptions(seed=seed, contractions=[circle_contraction(1)]))


@pytest.fixture(scope="session")
def torus_result():
    return torus_generation()


@pytest.fixture(scope="session")
def torus_data(torus_result):
    return torus_result.data


@pytest.fixture(scope="session")
def circle_result():
    return circle_generation()


def bulk_t(data, tdegrees=(0,), coeff=1):
    """gamma = coeff * t0 * om on the padded projective plane."""
    ctx = make_context(data.lattice, list(tdegrees), data.cutoff)
    X = data.X
    return ctx, CElement(X, ctx, {X.by_name("om"): ctx.t(0).scale(Fraction(coeff))})


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
