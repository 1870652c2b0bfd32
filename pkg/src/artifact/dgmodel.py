"""Finite graded-commutative dg algebras standing in for de Rham complexes.

Vectors are sparse dicts ``{basis index: Fraction}``; linear maps are dicts
``{source index: vector}``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as cartesian
from typing import Sequence

import sympy

from .novikov import RingContext, RingElement
from .report import Report

Vec = dict


def vec_add(x: Vec, y: Vec, scale=1) -> Vec:
    out = dict(x)
    for i, c in y.items():
        v = out.get(i, 0) + scale * c
        if v:
            out[i] = v
        else:
            out.pop(i, None)
    return out


def vec_scale(x: Vec, c) -> Vec:
    if c == 0:
        return {}
    return {i: v * c for i, v in x.items()}


def vec_clean(x: Vec) -> Vec:
    return {i: Fraction(v) if isinstance(v, int) else v for i, v in x.items() if v}


def apply_linear(table: dict, x: Vec) -> Vec:
    out: Vec = {}
    for i, c in x.items():
        for j, v in table.get(i, {}).items():
            out[j] = out.get(j, 0) + c * v
    return vec_clean(out)


class CDGAModel:
    """A finite graded-commutative dg algebra with a degree-n integral."""

    def __init__(self, n: int, basis: Sequence[tuple[str, int]], unit: int, differential=None,
                 product=None, integral=None, homotopy=None, projection=None, complete=True):
        self.n = int(n)
        self.names = [str(b[0]) for b in basis]
        self.degrees = [int(b[1]) for b in basis]
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis name")
        for name, deg in zip(self.names, self.degrees):
            if not 0 <= deg <= self.n:
                raise ValueError(f"basis element {name} has degree {deg} outside 0..{self.n}")
        self.unit = int(unit)
        if self.degrees[self.unit] != 0:
            raise ValueError("unit must have degree 0")
        self.d = {int(i): vec_clean(v) for i, v in (differential or {}).items()}
        self.d = {i: v for i, v in self.d.items() if v}
        table = {(int(i), int(j)): vec_clean(v) for (i, j), v in (product or {}).items()}
        if complete:
            table = self._complete(table)
        self.mult = {key: v for key, v in table.items() if v}
        self.integral = {int(i): Fraction(c) for i, c in (integral or {}).items() if c}
        self._given_h = None if homotopy is None else {int(i): vec_clean(v) for i, v in homotopy.items()}
        self._given_p = None if projection is None else {int(i): vec_clean(v) for i, v in projection.items()}
        self._sdr = None
        self.index = {name: i for i, name in enumerate(self.names)}

    def _complete(self, table):
        u = self.unit
        for i in range(self.dim):
            table.setdefault((u, i), {i: Fraction(1)})
            table.setdefault((i, u), {i: Fraction(1)})
        for (i, j), v in list(table.items()):
            if (j, i) not in table:
                s = -1 if self.degrees[i] * self.degrees[j] % 2 else 1
                table[(j, i)] = vec_scale(v, s)
        return table

    @property
    def dim(self) -> int:
        return len(self.names)

    def deg(self, i: int) -> int:
        return self.degrees[i]

    def basis_vec(self, i: int) -> Vec:
        return {i: Fraction(1)}

    def by_name(self, name: str) -> int:
        return self.index[name]

    def vec_degrees(self, x: Vec) -> set[int]:
        return {self.degrees[i] for i in x}

    def apply_d(self, x: Vec) -> Vec:
        return apply_linear(self.d, x)

    def mul_basis(self, i: int, j: int) -> Vec:
        return self.mult.get((i, j), {})

    def mul(self, x: Vec, y: Vec) -> Vec:
        out: Vec = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.mult.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return vec_clean(out)

    def integrate(self, x: Vec) -> Fraction:
        return sum((c * self.integral.get(i, 0) for i, c in x.items()), Fraction(0))

    def pair_basis(self, i: int, j: int) -> Fraction:
        s = -1 if self.degrees[j] % 2 else 1
        return s * self.integrate(self.mul_basis(i, j))

    def pair(self, x: Vec, y: Vec) -> Fraction:
        return sum((a * b * self.pair_basis(i, j) for i, a in x.items() for j, b in y.items()), Fraction(0))

    def pairing_matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.dim, self.dim, lambda i, j: sympy.Rational(self.pair_basis(i, j)))

    # -- strong deformation retract onto a harmonic subspace

    def _matrix(self, table) -> sympy.Matrix:
        m = sympy.zeros(self.dim, self.dim)
        for j, v in table.items():
            for i, c in v.items():
                m[i, j] = sympy.Rational(c.numerator, c.denominator)
        return m

    def _compute_sdr(self):
        return retract(self.degrees, self.d)

    def sdr(self):
        """Return (h, P, harmonic basis) with dh + hd = 1 - P."""
        if self._sdr is None:
            if self._given_h is not None:
                h = self._given_h
                p = self._given_p
                if p is None:
                    p = _table(sympy.eye(self.dim) - self._matrix(self.d) * self._matrix(h) - self._matrix(h) * self._matrix(self.d))
                self._sdr = (h, p, None)
            else:
                self._sdr = self._compute_sdr()
        return self._sdr

    def apply_h(self, x: Vec) -> Vec:
        return apply_linear(self.sdr()[0], x)

    def apply_p(self, x: Vec) -> Vec:
        return apply_linear(self.sdr()[1], x)

    def element(self, ctx: RingContext, coeffs: dict) -> "CElement":
        return CElement(self, ctx, coeffs)

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "basis": [[nm, dg] for nm, dg in zip(self.names, self.degrees)],
            "unit": self.names[self.unit],
            "d": {self.names[i]: _named(self, v) for i, v in sorted(self.d.items())},
            "product": [
                [self.names[i], self.names[j], _named(self, v)]
                for (i, j), v in sorted(self.mult.items())
                if i != self.unit and j != self.unit and i <= j
            ],
            "integral": {self.names[i]: c for i, c in sorted(self.integral.items())},
        }
        if self._given_h is not None:
            out["homotopy"] = {self.names[i]: _named(self, v) for i, v in sorted(self._given_h.items()) if v}
        return out


def retract(degrees: Sequence[int], d: dict):
    """Split a finite complex as boundaries + harmonic + complement.

    Returns (h, P, harmonic basis) with dh + hd = 1 - P, h^2 = 0, hP = 0.
    """
    dim = len(degrees)
    top = max(degrees, default=0)
    D = _matrix_of(d, dim)
    cols_B, cols_H, cols_C = [], [], []
    by_deg = {k: [i for i in range(dim) if degrees[i] == k] for k in range(top + 2)}
    image_of_C: dict[int, list] = {k: [] for k in range(top + 2)}
    for k in range(top + 1):
        idx = by_deg[k]
        if not idx:
            continue
        Dk = D[:, idx]
        kernel = [_embed(v, idx, dim) for v in Dk.nullspace()]
        boundaries = image_of_C[k]
        # harmonic representatives: prefer standard basis vectors
        span = list(boundaries)
        harmonic = []
        candidates = [_unit(i, dim) for i in idx] + kernel
        for v in candidates:
            if (D * v).is_zero_matrix and _rank(span + [v]) > len(span):
                span.append(v)
                harmonic.append(v)
        if len(span) != len(kernel):
            raise ValueError(f"degree {k}: image of d not inside kernel")
        comp = []
        for i in idx:
            v = _unit(i, dim)
            if _rank(span + comp + [v]) > len(span) + len(comp):
                comp.append(v)
        for c in comp:
            image_of_C[k + 1].append(D * c)
        cols_B.extend(boundaries)
        cols_H.extend(harmonic)
        cols_C.extend(comp)
    # the j-th boundary is d of the j-th complement vector
    M = sympy.Matrix.hstack(*(cols_B + cols_H + cols_C)) if dim else sympy.zeros(0, 0)
    if M.shape != (dim, dim) or M.rank() != dim:
        raise ValueError("failed to split the complex")
    nb, nh = len(cols_B), len(cols_H)
    Hn = sympy.zeros(dim, dim)
    Pn = sympy.zeros(dim, dim)
    for j in range(nb):
        Hn[nb + nh + j, j] = 1
    for j in range(nh):
        Pn[nb + j, nb + j] = 1
    Minv = M.inv()
    h = M * Hn * Minv
    p = M * Pn * Minv
    return _table(h), _table(p), [_sparse(v) for v in cols_H]


def _matrix_of(table, dim):
    m = sympy.zeros(dim, dim)
    for j, v in table.items():
        for i, c in v.items():
            c = Fraction(c)
            m[i, j] = sympy.Rational(c.numerator, c.denominator)
    return m


def _named(model, v: Vec) -> dict:
    return {model.names[i]: c for i, c in sorted(v.items())}


def _unit(i, dim):
    v = sympy.zeros(dim, 1)
    v[i] = 1
    return v


def _embed(v, idx, dim):
    out = sympy.zeros(dim, 1)
    for a, i in enumerate(idx):
        out[i] = v[a]
    return out


def _rank(vectors) -> int:
    if not vectors:
        return 0
    return sympy.Matrix.hstack(*vectors).rank()


def _sparse(v) -> Vec:
    return {i: Fraction(int(x.p), int(x.q)) for i, x in enumerate(v) if x != 0}


def _table(m) -> dict:
    out = {}
    for j in range(m.shape[1]):
        col = {i: Fraction(int(m[i, j].p), int(m[i, j].q)) for i in range(m.shape[0]) if m[i, j] != 0}
        if col:
            out[j] = col
    return out


def check_model(m: CDGAModel) -> Report:
    rep = Report(f"model n={m.n}, dim={m.dim}")
    B = range(m.dim)
    for i in B:
        dd = m.apply_d(m.apply_d({i: Fraction(1)}))
        rep.record("d squared", not dd, {"x": m.names[i]})
        for j, c in m.d.get(i, {}).items():
            rep.record("d raises degree by one", m.degrees[j] == m.degrees[i] + 1, {"x": m.names[i], "term": m.names[j]})
    for i, j in cartesian(B, B):
        xy = m.mul_basis(i, j)
        for k in xy:
            rep.record("product degree", m.degrees[k] == m.degrees[i] + m.degrees[j], {"x": m.names[i], "y": m.names[j]})
        s = -1 if m.degrees[i] * m.degrees[j] % 2 else 1
        rep.record("graded commutativity", xy == vec_scale(m.mul_basis(j, i), s), {"x": m.names[i], "y": m.names[j]})
        lhs = m.apply_d(xy)
        rhs = vec_add(m.mul(m.apply_d({i: 1}), {j: 1}), m.mul({i: 1}, m.apply_d({j: 1})), -1 if m.degrees[i] % 2 else 1)
        rep.record("Leibniz", lhs == rhs, {"x": m.names[i], "y": m.names[j]})
    for i, j, k in cartesian(B, B, B):
        a = m.mul(m.mul({i: 1}, {j: 1}), {k: 1})
        b = m.mul({i: 1}, m.mul({j: 1}, {k: 1}))
        rep.record("associativity", a == b, (m.names[i], m.names[j], m.names[k]))
    for i in B:
        rep.record("unit", m.mul({m.unit: 1}, {i: 1}) == {i: 1} and m.mul({i: 1}, {m.unit: 1}) == {i: 1}, m.names[i])
    for i, c in m.integral.items():
        rep.record("integral supported in top degree", m.degrees[i] == m.n, m.names[i])
    for i in B:
        if m.degrees[i] == m.n - 1:
            rep.record("Stokes", m.integrate(m.apply_d({i: 1})) == 0, m.names[i])
    G = m.pairing_matrix()
    rep.record("pairing nondegenerate", G.rank() == m.dim, {"rank": G.rank(), "dim": m.dim})
    for i, j in cartesian(B, B):
        s = -1 if ((m.degrees[i] + 1) * (m.degrees[j] + 1) + 1) % 2 else 1
        rep.record("pairing antisymmetry", m.pair_basis(i, j) == s * m.pair_basis(j, i), (m.names[i], m.names[j]))
    try:
        h, p, _ = m.sdr()
    except ValueError as exc:
        rep.record("homotopy", False, str(exc))
        return rep
    for i in B:
        e = {i: Fraction(1)}
        lhs = vec_add(m.apply_d(apply_linear(h, e)), apply_linear(h, m.apply_d(e)))
        rhs = vec_add(e, apply_linear(p, e), -1)
        rep.record("homotopy identity dh+hd=1-P", lhs == rhs, m.names[i])
        rep.record("h squared", not apply_linear(h, apply_linear(h, e)), m.names[i])
        rep.record("hP", not apply_linear(h, apply_linear(p, e)), m.names[i])
        rep.record("dP", not m.apply_d(apply_linear(p, e)), m.names[i])
        rep.record("P projects", apply_linear(p, apply_linear(p, e)) == apply_linear(p, e), m.names[i])
        for j in apply_linear(h, e):
            rep.record("h lowers degree", m.degrees[j] == m.degrees[i] - 1, m.names[i])
    return rep


class RelativePairModel:
    """Ambient model, boundary model, restriction, relative subcomplex and periods.

    The relative subspace is spanned by a subset of ambient basis elements.
    """

    def __init__(self, xmodel: CDGAModel, lmodel: CDGAModel, restriction: dict, relative: Sequence[int], periods: Sequence[dict]):
        self.x = xmodel
        self.l = lmodel
        self.r = {int(i): vec_clean(v) for i, v in restriction.items()}
        self.relative = tuple(sorted(int(i) for i in relative))
        self.periods = [{int(i): Fraction(c) for i, c in p.items() if c} for p in periods]
        self._rel_set = set(self.relative)

    def restrict(self, x: Vec) -> Vec:
        return apply_linear(self.r, x)

    def is_relative(self, x: Vec) -> bool:
        return all(i in self._rel_set for i in x)

    def is_closed(self, x: Vec) -> bool:
        return not self.x.apply_d(x)

    @property
    def divisor_basis(self) -> tuple[int, ...]:
        """Relative basis elements of degree 2 that are closed."""
        return tuple(i for i in self.relative if self.x.degrees[i] == 2 and not self.x.d.get(i))

    def period(self, beta, x: Vec) -> Fraction:
        if not self.is_relative(x):
            raise ValueError("period of a non-relative cochain")
        if not self.is_closed(x):
            raise ValueError("period of a non-closed cochain")
        if any(self.x.degrees[i] != 2 for i in x):
            raise ValueError("periods are defined on degree-2 cochains")
        if len(beta) != len(self.periods):
            raise ValueError("lattice rank does not match the period table")
        total = Fraction(0)
        for b, per in zip(beta, self.periods):
            if b:
                total += b * sum((c * per.get(i, 0) for i, c in x.items()), Fraction(0))
        return total

    def basis_period(self, beta, i: int) -> Fraction:
        return self.period(beta, {i: Fraction(1)})

    def check(self) -> Report:
        rep = Report("relative pair")
        X, L = self.x, self.l
        for i in range(X.dim):
            e = {i: Fraction(1)}
            for j in self.r.get(i, {}):
                rep.record("restriction preserves degree", L.degrees[j] == X.degrees[i], X.names[i])
            rep.record("restriction is a chain map", self.restrict(X.apply_d(e)) == L.apply_d(self.restrict(e)), X.names[i])
            for j in range(X.dim):
                lhs = self.restrict(X.mul_basis(i, j))
                rhs = L.mul(self.restrict(e), self.restrict({j: 1}))
                rep.record("restriction is multiplicative", lhs == rhs, (X.names[i], X.names[j]))
        rep.record("restriction sends unit to unit", self.restrict({X.unit: 1}) == {L.unit: Fraction(1)}, X.names[X.unit])
        for i in self.relative:
            img = self.restrict({i: 1})
            if X.degrees[i] == 0:
                ok = set(img) <= {L.unit}
            else:
                ok = not img
            rep.record("relative condition", ok, X.names[i])
            rep.record("relative subspace closed under d", self.is_relative(X.apply_d({i: 1})), X.names[i])
        for g, per in enumerate(self.periods):
            for i in per:
                rep.record("periods on relative degree-2", i in self._rel_set and X.degrees[i] == 2, (g, X.names[i]))
            for i in self.relative:
                if X.degrees[i] == 1:
                    dx = X.apply_d({i: 1})
                    val = sum((c * per.get(j, 0) for j, c in dx.items()), Fraction(0))
                    rep.record("periods vanish on exact cochains", val == 0, (g, X.names[i]))
        return rep


class CElement:
    """Element of (model) tensor (ring): basis index -> RingElement."""

    __slots__ = ("model", "ctx", "coeffs")

    def __init__(self, model: CDGAModel, ctx: RingContext, coeffs: dict):
        self.model = model
        self.ctx = ctx
        self.coeffs = {}
        for i, c in coeffs.items():
            if not isinstance(c, RingElement):
                c = ctx.constant(c)
            elif c.ctx != ctx:
                raise ValueError("ring context mismatch")
            if not c.is_zero():
                self.coeffs[int(i)] = c

    @classmethod
    def basis(cls, model, ctx, i, coeff=1) -> "CElement":
        return cls(model, ctx, {i: coeff})

    def _check(self, other):
        if other.model is not self.model or other.ctx != self.ctx:
            raise ValueError("context mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out[i] + c if i in out else c
        return CElement(self.model, self.ctx, out)

    def __neg__(self):
        return CElement(self.model, self.ctx, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, r) -> "CElement":
        return CElement(self.model, self.ctx, {i: c * r for i, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, CElement):
            return NotImplemented
        return self.model is other.model and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> set[int]:
        """Total degrees (form degree plus ring grade) of the terms."""
        out = set()
        for i, c in self.coeffs.items():
            for g in c.grades():
                out.add(self.model.degrees[i] + g)
        return out

    def valuation(self):
        return min((c.valuation() for c in self.coeffs.values()), default=float("inf"))

    def d(self) -> "CElement":
        out = {}
        for i, c in self.coeffs.items():
            for j, v in self.model.d.get(i, {}).items():
                out[j] = out[j] + c * v if j in out else c * v
        return CElement(self.model, self.ctx, out)

    def __repr__(self):
        parts = [f"({c})*{self.model.names[i]}" for i, c in sorted(self.coeffs.items())]
        return " + ".join(parts) if parts else "0"


def wedge(x: CElement, y: CElement) -> CElement:
    # ring grades are even, so coefficients move past forms without sign
    x._check(y)
    m = x.model
    out: dict = {}
    for i, a in x.coeffs.items():
        for j, b in y.coeffs.items():
            ab = a * b
            for k, c in m.mul_basis(i, j).items():
                term = ab.scale(c)
                out[k] = out[k] + term if k in out else term
    return CElement(m, x.ctx, out)


def pairing(x: CElement, y: CElement) -> RingElement:
    x._check(y)
    m = x.model
    total = x.ctx.zero()
    for i, a in x.coeffs.items():
        for j, b in y.coeffs.items():
            v = m.pair_basis(i, j)
            if v:
                total = total + (a * b).scale(v)
    return total


# -- stock models


def circle_model() -> CDGAModel:
    return CDGAModel(1, [("1", 0), ("th", 1)], 0, integral={1: 1})


def torus_model() -> CDGAModel:
    """Cohomology of the 2-torus with zero differential."""
    basis = [("1", 0), ("th1", 1), ("th2", 1), ("vol", 2)]
    return CDGAModel(2, basis, 0, product={(1, 2): {3: 1}}, integral={3: 1})


def torus_model_padded(c=1) -> CDGAModel:
    """Torus cohomology plus an acyclic square-zero block u, v=du, w, z=dw.

    The block pairs with itself through u*z = c*vol and w*v = c*vol, so the
    pairing stays nondegenerate while the complex has room for homotopies.
    """
    c = Fraction(c)
    basis = [("1", 0), ("th1", 1), ("th2", 1), ("vol", 2), ("u", 0), ("v", 1), ("w", 1), ("z", 2)]
    product = {(1, 2): {3: 1}, (4, 7): {3: c}, (5, 6): {3: -c}}
    return CDGAModel(2, basis, 0, differential={4: {5: 1}, 6: {7: 1}}, product=product, integral={3: 1})


def projective_plane_padded(kappa=1) -> CDGAModel:
    """Cohomology of the complex projective plane plus an acyclic block a, b=da, c, e=dc."""
    kappa = Fraction(kappa)
    basis = [("1", 0), ("om", 2), ("om2", 4), ("a", 1), ("b", 2), ("c", 2), ("e", 3)]
    product = {(1, 1): {2: 1}, (3, 6): {2: kappa}, (4, 5): {2: kappa}}
    return CDGAModel(4, basis, 0, differential={3: {4: 1}, 5: {6: 1}}, product=product, integral={2: 1})


def torus_contraction(e1=1, e2=0) -> dict:
    """Contraction with the boundary class (e1, e2) on the torus harmonic basis 1, th1, th2, vol."""
    e1, e2 = Fraction(e1), Fraction(e2)
    return {1: vec_clean({0: e1}), 2: vec_clean({0: e2}), 3: vec_clean({2: e1, 1: -e2})}


def circle_contraction(e=1) -> dict:
    return {1: vec_clean({0: Fraction(e)})}


def point_pair(xmodel: CDGAModel, lmodel: CDGAModel, periods: Sequence[dict]) -> RelativePairModel:
    """Pair in which only the unit restricts nontrivially and every basis element is relative."""
    restriction = {xmodel.unit: {lmodel.unit: 1}}
    return RelativePairModel(xmodel, lmodel, restriction, range(xmodel.dim), periods)
