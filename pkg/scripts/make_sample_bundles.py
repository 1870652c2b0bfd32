"""Write the sample bundles shipped in bundles/."""

from fractions import Fraction
import os
import sys

from artifact.cli import Bundle, emit_bundle_text
from artifact.dgmodel import (CElement, RelativePairModel, circle_model, point_pair, projective_plane_padded, torus_contraction,
                              torus_model, torus_model_padded)
from artifact.novikov import DegreeLattice
from artifact.qops import CorrelatorData, make_context


def energy_zero(lmodel):
    lat = DegreeLattice.from_pairs([])
    pair = RelativePairModel(lmodel, lmodel, {i: {i: 1} for i in range(lmodel.dim)}, [], [])
    ctx = make_context(lat, [], 1)
    data = CorrelatorData(pair, lat, 1, 4, 0)
    return Bundle(pair, lat, ctx, data, [], provenance={"source": "stock energy-zero model"}, has_x=False)


def torus_template():
    X, L = projective_plane_padded(), torus_model_padded()
    pair = point_pair(X, L, [{1: 1}])
    lat = DegreeLattice.from_pairs([(1, 2)])
    ctx = make_context(lat, [0], 2)
    data = CorrelatorData(pair, lat, 2, 3, 2)
    gamma = CElement(X, ctx, {1: ctx.t(0)})
    eta = CElement(X, ctx, {3: ctx.t(0).scale(Fraction(1, 2))})
    variables = [{"name": "t0", "degree": 0, "role": None, "divisor": None}]
    prov = {"seed": 3, "options": {"contractions": [
        {L.names[i]: {L.names[j]: str(c) for j, c in v.items()} for i, v in torus_contraction(1, 0).items()}]}}
    return Bundle(pair, lat, ctx, data, variables, gamma, gamma - eta.d(), eta, prov, 12)


def main(out="bundles"):
    os.makedirs(out, exist_ok=True)
    for name, b in (("circle_energy_zero.json", energy_zero(circle_model())),
                    ("torus_energy_zero.json", energy_zero(torus_model())),
                    ("torus_template.json", torus_template())):
        with open(os.path.join(out, name), "w", encoding="utf-8") as fh:
            fh.write(emit_bundle_text(b))


if __name__ == "__main__":
    main(*sys.argv[1:])
