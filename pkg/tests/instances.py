"""Random operation tables on small graded models, for comparing residual evaluators."""

from fractions import Fraction
from itertools import product as cartesian

from artifact.dgmodel import CDGAModel
from artifact.novikov import DegreeLattice
from artifact.qops import AInftyStructure, make_context


def random_model(rng, dim):
    degrees = [0] + [rng.randint(0, 3) for _ in range(dim - 1)]
    return CDGAModel(3, [(f"x{i}", d) for i, d in enumerate(degrees)], 0)


def random_coefficient(ctx, rng):
    c = ctx.zero()
    for _ in range(rng.randint(1, 2)):
        beta = (rng.randint(0, 1),)
        c = c + ctx.monomial(beta=beta, t=(rng.randint(0, 1),), coeff=Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
    return c


def random_instance(rng, max_dim=6, kmax=4, density=0.3):
    dim = rng.randint(1, max_dim)
    model = random_model(rng, dim)
    ctx = make_context(DegreeLattice.from_pairs([(1, 2)]), [0], 3)
    ops = {}
    for k in range(kmax + 1):
        table = {}
        tuples = list(cartesian(range(dim), repeat=k))
        for a in rng.sample(tuples, max(1, int(density * len(tuples))) if k < 3 else min(len(tuples), 12)):
            vec = {}
            for o in rng.sample(range(dim), rng.randint(1, min(2, dim))):
                c = random_coefficient(ctx, rng)
                if not c.is_zero():
                    vec[o] = c
            if vec:
                table[a] = vec
        ops[k] = table
    return AInftyStructure(model, ctx, ops, kmax=kmax)
