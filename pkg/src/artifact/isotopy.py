"""Pseudo-isotopies over polynomial forms on the unit interval.

An element of the interval algebra is a + dt*b with a, b polynomials in t; dt is
odd and always written on the left.  Interval elements of a model are sums of
dt^e t^p x with ring coefficients, stored as {(e, p, basis index): RingElement}.
"""

from collections import defaultdict
from fractions import Fraction
from itertools import product as cartesian
from math import factorial
import random
from typing import Sequence

from .dgmodel import CDGAModel, CElement
from .novikov import RingContext, RingElement
from .qops import CorrelatorData, build_m
from .report import Report
from .signs import isotopy_nu

# p_*(dt t^p x) = (-1)^(FIBER_ORIENTATION * n) dt t^p (integral of x).  Interval
# forms pass through push-forwards from the left; the Stokes identity holds for
# either value and the uniform relations on odd-dimensional L pick this one.
FIBER_ORIENTATION = 0


class TDegreeOverflow(ValueError):
    pass


def _radd(out: dict, key, val: RingElement):
    cur = out.get(key)
    out[key] = val if cur is None else cur + val


def _clean(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if not v.is_zero()}


class IntervalAlgebra:
    """Element of R tensor polynomial forms on [0,1]: {(e, p): RingElement} for dt^e t^p."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: RingContext, terms: dict | None = None):
        self.ctx = ctx
        self.terms = _clean(terms or {})
        for (e, p) in self.terms:
            if e not in (0, 1) or p < 0:
                raise ValueError(f"bad interval monomial {(e, p)}")

    @classmethod
    def scalar(cls, c: RingElement, e=0, p=0) -> "IntervalAlgebra":
        return cls(c.ctx, {(e, p): c})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            _radd(out, k, v)
        return IntervalAlgebra(self.ctx, out)

    def __neg__(self):
        return IntervalAlgebra(self.ctx, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, IntervalAlgebra):
            return IntervalAlgebra(self.ctx, {k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (e1, p1), a in self.terms.items():
            for (e2, p2), b in other.terms.items():
                if e1 + e2 < 2:
                    # ring coefficients are even, t is even: no signs
                    _radd(out, (e1 + e2, p1 + p2), a * b)
        return IntervalAlgebra(self.ctx, out)

    def scale(self, c) -> "IntervalAlgebra":
        return IntervalAlgebra(self.ctx, {k: v.scale(c) for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, IntervalAlgebra):
            return NotImplemented
        return self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def d(self) -> "IntervalAlgebra":
        out: dict = {}
        for (e, p), c in self.terms.items():
            if e == 0 and p > 0:
                _radd(out, (1, p - 1), c.scale(p))
        return IntervalAlgebra(self.ctx, out)

    def at(self, t) -> RingElement:
        t = Fraction(t)
        total = self.ctx.zero()
        for (e, p), c in self.terms.items():
            if e == 0:
                total = total + c.scale(t ** p)
        return total

    def integral(self) -> RingElement:
        """Integral over [0,1]; only the dt part contributes."""
        total = self.ctx.zero()
        for (e, p), c in self.terms.items():
            if e == 1:
                total = total + c.scale(Fraction(1, p + 1))
        return total

    def tdegree(self) -> int:
        return max((p for _, p in self.terms), default=0)

    def __repr__(self):
        parts = []
        for (e, p), c in sorted(self.terms.items()):
            mono = ("dt " if e else "") + (f"t^{p}" if p else "1")
            parts.append(f"({c})*{mono}")
        return " + ".join(parts) if parts else "0"


class IntervalElement:
    """Element of (model) tensor R tensor polynomial forms: {(e, p, i): RingElement}."""

    __slots__ = ("model", "ctx", "terms")

    def __init__(self, model: CDGAModel, ctx: RingContext, terms: dict | None = None):
        self.model = model
        self.ctx = ctx
        out = {}
        for (e, p, i), c in (terms or {}).items():
            if not isinstance(c, RingElement):
                c = ctx.constant(c)
            if e not in (0, 1) or p < 0:
                raise ValueError(f"bad interval monomial {(e, p)}")
            if not c.is_zero():
                out[(e, p, int(i))] = c
        self.terms = out

    @classmethod
    def basis(cls, model, ctx, e: int, p: int, i: int, coeff=1) -> "IntervalElement":
        return cls(model, ctx, {(e, p, i): coeff})

    @classmethod
    def constant(cls, x: CElement) -> "IntervalElement":
        return cls(x.model, x.ctx, {(0, 0, i): c for i, c in x.coeffs.items()})

    @classmethod
    def from_parts(cls, a: dict, b: dict | None = None, model=None, ctx=None) -> "IntervalElement":
        """a + dt*b with a, b given as {p: CElement}."""
        terms: dict = {}
        for e, part in ((0, a), (1, b or {})):
            for p, x in part.items():
                model, ctx = x.model, x.ctx
                for i, c in x.coeffs.items():
                    _radd(terms, (e, p, i), c)
        return cls(model, ctx, terms)

    def _check(self, other):
        if other.model is not self.model or other.ctx != self.ctx:
            raise ValueError("context mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _radd(out, k, v)
        return IntervalElement(self.model, self.ctx, out)

    def __neg__(self):
        return IntervalElement(self.model, self.ctx, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "IntervalElement":
        if isinstance(c, RingElement):
            return IntervalElement(self.model, self.ctx, {k: v * c for k, v in self.terms.items()})
        return IntervalElement(self.model, self.ctx, {k: v.scale(c) for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, IntervalElement):
            return NotImplemented
        return self.model is other.model and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        out = set()
        for (e, p, i), c in self.terms.items():
            for g in c.grades():
                out.add(e + self.model.degrees[i] + g)
        return out

    def valuation(self):
        return min((c.valuation() for c in self.terms.values()), default=float("inf"))

    def tdegree(self) -> int:
        return max((p for _, p, _ in self.terms), default=0)

    def d(self) -> "IntervalElement":
        """d(t^p x) = p t^(p-1) dt x + t^p dx and d(dt t^p x) = -dt t^p dx."""
        out: dict = {}
        md = self.model.d
        for (e, p, i), c in self.terms.items():
            if e == 0 and p > 0:
                _radd(out, (1, p - 1, i), c.scale(p))
            for j, v in md.get(i, {}).items():
                _radd(out, (e, p, j), c.scale(-v if e else v))
        return IntervalElement(self.model, self.ctx, out)

    def restrict(self, t) -> CElement:
        """Pullback along the inclusion at time t."""
        t = Fraction(t)
        out: dict = {}
        for (e, p, i), c in self.terms.items():
            if e == 0:
                _radd(out, i, c.scale(t ** p))
        return CElement(self.model, self.ctx, out)

    def parts(self) -> tuple[dict, dict]:
        """(a, b) with self = a + dt*b, each as {p: CElement}."""
        split: list = [defaultdict(dict), defaultdict(dict)]
        for (e, p, i), c in self.terms.items():
            split[e][p][i] = c
        return tuple({p: CElement(self.model, self.ctx, v) for p, v in s.items()} for s in split)

    def __repr__(self):
        parts = []
        names = self.model.names
        for (e, p, i), c in sorted(self.terms.items()):
            mono = ("dt " if e else "") + (f"t^{p} " if p else "")
            parts.append(f"({c})*{mono}{names[i]}")
        return " + ".join(parts) if parts else "0"


def interval_wedge(x: IntervalElement, y: IntervalElement) -> IntervalElement:
    x._check(y)
    m = x.model
    out: dict = {}
    for (e1, p1, i), a in x.terms.items():
        for (e2, p2, j), b in y.terms.items():
            if e1 + e2 > 1:
                continue
            s = -1 if e2 and m.degrees[i] % 2 else 1
            ab = a * b
            for k, c in m.mul_basis(i, j).items():
                _radd(out, (e1 + e2, p1 + p2, k), ab.scale(s * c))
    return IntervalElement(m, x.ctx, out)


def fiber_integral(x: IntervalElement) -> IntervalAlgebra:
    """Integration over the fiber L; the interval factor stays on the left."""
    m = x.model
    flip = FIBER_ORIENTATION * m.n % 2
    out: dict = {}
    for (e, p, i), c in x.terms.items():
        v = m.integral.get(i, 0)
        if v:
            _radd(out, (e, p), c.scale(-v if e and flip else v))
    return IntervalAlgebra(x.ctx, out)


def big_pairing(x: IntervalElement, y: IntervalElement) -> IntervalAlgebra:
    """<<x, y>> = (-1)^|y| p_*(x y), taken termwise in y."""
    x._check(y)
    total = IntervalAlgebra(x.ctx)
    for key, c in y.terms.items():
        e, p, j = key
        s = -1 if (e + y.model.degrees[j]) % 2 else 1
        term = IntervalElement(y.model, y.ctx, {key: c.scale(s)})
        total = total + fiber_integral(interval_wedge(x, term))
    return total


def build_gamma_tilde(gamma: CElement, gamma_prime: CElement, eta: CElement) -> IntervalElement:
    """gamma + t (gamma' - gamma) - dt eta, closed when d eta = gamma - gamma'."""
    if not (eta.d() == gamma - gamma_prime):
        raise ValueError("d(eta) must equal gamma - gamma_prime")
    out = IntervalElement.from_parts({0: gamma, 1: gamma_prime - gamma}, {0: -eta},
                                     model=gamma.model, ctx=gamma.ctx)
    assert out.d().is_zero()
    return out


def _check_bulk_interval(data: CorrelatorData, gt: IntervalElement):
    pair = data.pair
    if gt.model is not data.X:
        raise ValueError("bulk element must live in the ambient model")
    if not pair.is_relative({i: 1 for _, _, i in gt.terms}):
        raise ValueError("bulk element is not relative")
    if not gt.d().is_zero():
        raise ValueError("bulk element is not closed")
    if gt.degrees() - {2}:
        raise ValueError("bulk element must have total degree 2")
    if not gt.is_zero():
        nu = gt.valuation()
        if not nu > 0:
            raise ValueError("bulk element must have positive valuation")
        if (data.lmax + 1) * nu <= gt.ctx.cutoff:
            raise ValueError("interior arity cap is too small for this bulk element and cutoff")


class IsotopyStructure:
    """The operations m~_k on interval elements of L, plus the scalar m~_{-1}."""

    def __init__(self, data: CorrelatorData, gamma_tilde: IntervalElement, t_degree_cap: int = 12):
        _check_bulk_interval(data, gamma_tilde)
        if gamma_tilde.ctx.lattice != data.lattice:
            raise ValueError("ring context uses a different lattice")
        self.data = data
        self.model = data.L
        self.ctx = gamma_tilde.ctx
        self.gamma = gamma_tilde
        self.kmax = data.kmax
        self.n = data.n
        self.cap = t_degree_cap
        self.unit = data.L.unit
        self.view = data.view()
        self._memo: dict = {}
        self._basis_memo: dict = {}
        comps = [(e, p, g, c) for (e, p, g), c in gamma_tilde.terms.items()]
        self._weights = {}
        Xd = data.X.degrees
        for l in range(data.lmax + 1):
            # {(g tuple): {(e, p): RingElement}} with 1/l! and the sign of moving dt past
            # earlier interior inputs folded in
            acc: dict = defaultdict(dict)
            for combo in cartesian(comps, repeat=l):
                e_tot = sum(c[0] for c in combo)
                if e_tot > 1:
                    continue
                coeff = self.ctx.one().scale(Fraction(1, factorial(l)))
                sign = 0
                run = 0
                for e, p, g, c in combo:
                    coeff = coeff * c
                    if e:
                        sign += run
                    run += Xd[g]
                if coeff.is_zero():
                    continue
                key = (e_tot, sum(c[1] for c in combo))
                g = tuple(c[2] for c in combo)
                _radd(acc[g], key, coeff.scale(-1) if sign % 2 else coeff)
            self._weights[l] = {g: _clean(v) for g, v in acc.items()}
        self._minus1 = self._compute_minus1()

    def _overflow(self, p: int):
        if p > self.cap:
            raise TDegreeOverflow(f"t-degree {p} exceeds the cap {self.cap}")

    def core(self, a: tuple) -> dict:
        """sum_l 1/l! q_{k,l}(a; gamma~^l) on constant inputs: {(e, p, o): RingElement}."""
        if a in self._memo:
            return self._memo[a]
        k = len(a)
        out: dict = {}
        if k <= self.kmax:
            # dt from the bulk passes the boundary inputs and flips the sign convention once
            shift = 1 + sum(self.model.degrees[i] for i in a)
            for beta in self.data.betas():
                Tb = self.ctx.T(beta)
                for l, weights in self._weights.items():
                    table = self.view.get((beta, k, l))
                    if not table:
                        continue
                    for g, wts in weights.items():
                        vec = table.get((a, g))
                        if not vec:
                            continue
                        for (e, p), w in wts.items():
                            self._overflow(p)
                            c = Tb * w
                            if e and shift % 2:
                                c = -c
                            for o, v in vec.items():
                                _radd(out, (e, p, o), c.scale(v))
        out = _clean(out)
        self._memo[a] = out
        return out

    def _compute_minus1(self) -> IntervalAlgebra:
        out: dict = {}
        for beta in self.data.betas():
            Tb = self.ctx.T(beta)
            for l, weights in self._weights.items():
                vals = self.view.minus1.get((beta, l), {})
                for g, wts in weights.items():
                    v = vals.get(g)
                    if not v:
                        continue
                    for (e, p), w in wts.items():
                        self._overflow(p)
                        c = (Tb * w).scale(v)
                        _radd(out, (e, p), -c if e else c)
        return IntervalAlgebra(self.ctx, out)

    @property
    def m_minus1(self) -> IntervalAlgebra:
        return self._minus1

    def value(self, x: tuple) -> dict:
        """m~_k on a tuple of interval basis monomials (e, p, i)."""
        if x in self._basis_memo:
            return self._basis_memo[x]
        Ld = self.model.degrees
        e_in = sum(e for e, _, _ in x)
        out: dict = {}
        if e_in <= 1:
            p_in = sum(p for _, p, _ in x)
            sign = 0
            run = 0
            for e, _, i in x:
                if e:
                    sign = 1 + run
                run += Ld[i] + 1
            a = tuple(i for _, _, i in x)
            for (e, p, o), c in self.core(a).items():
                if e + e_in > 1:
                    continue
                self._overflow(p + p_in)
                _radd(out, (e + e_in, p + p_in, o), -c if sign % 2 else c)
            if len(x) == 1:
                e, p, i = x[0]
                if e == 0 and p > 0:
                    _radd(out, (1, p - 1, i), self.ctx.constant(p))
        out = _clean(out)
        self._basis_memo[x] = out
        return out

    def apply(self, inputs: Sequence[IntervalElement]) -> IntervalElement:
        out: dict = {}
        for combo in cartesian(*[list(x.terms.items()) for x in inputs]):
            coeff = self.ctx.one()
            for _, c in combo:
                coeff = coeff * c
            if coeff.is_zero():
                continue
            for key, v in self.value(tuple(k for k, _ in combo)).items():
                _radd(out, key, coeff * v)
        return IntervalElement(self.model, self.ctx, out)

    def at(self, t) -> "object":
        """The structure obtained by restricting the bulk to time t."""
        return build_m(self.data, self.gamma.restrict(t))


def build_isotopy(data: CorrelatorData, gamma_tilde: IntervalElement, t_degree_cap: int = 12) -> IsotopyStructure:
    return IsotopyStructure(data, gamma_tilde, t_degree_cap)


# -- checkers


def interval_basis(model: CDGAModel, t_degree: int) -> list:
    return [(e, p, i) for e in (0, 1) for p in range(t_degree + 1) for i in range(model.dim)]


def _tuples(model: CDGAModel, k: int, t_degree: int, limit: int | None, rng: random.Random):
    """Tuples of interval monomials with at most one dt and total t-degree <= t_degree."""
    basis = interval_basis(model, t_degree)
    full = []
    for tup in cartesian(basis, repeat=k):
        if sum(e for e, _, _ in tup) <= 1 and sum(p for _, p, _ in tup) <= t_degree:
            full.append(tup)
    if limit is not None and len(full) > limit:
        return rng.sample(full, limit), len(full)
    return full, len(full)


def _mono_deg(model: CDGAModel, mono) -> int:
    e, _, i = mono
    return e + model.degrees[i]


def _elem(m: IsotopyStructure, mono) -> IntervalElement:
    return IntervalElement.basis(m.model, m.ctx, *mono)


def _vec_elem(m: IsotopyStructure, vec: dict) -> IntervalElement:
    return IntervalElement(m.model, m.ctx, vec)


def _names(model, tup) -> str:
    parts = []
    for e, p, i in tup:
        parts.append(("dt " if e else "") + (f"t^{p} " if p else "") + model.names[i])
    return ", ".join(parts)


def ainfty_residual_interval(m: IsotopyStructure, x: tuple) -> IntervalElement:
    k = len(x)
    L = m.model
    total: dict = {}
    for start in range(k + 1):
        for stop in range(start, k + 1):
            if k - (stop - start) + 1 > m.kmax:
                continue
            inner = m.value(x[start:stop])
            if not inner:
                continue
            s = sum(_mono_deg(L, y) + 1 for y in x[:start]) % 2
            for key, c in inner.items():
                outer = m.value(x[:start] + (key,) + x[stop:])
                for o, w in outer.items():
                    _radd(total, o, -(c * w) if s else c * w)
    return _vec_elem(m, _clean(total))


def check_interval_ainfty(m: IsotopyStructure, kmax: int = 3, t_degree: int = 1, limit: int | None = 4000,
                          seed: int = 0) -> Report:
    rep = Report("interval A-infinity relations")
    chk = rep.check("A-infinity relation on interval elements")
    rng = random.Random(seed)
    for k in range(min(kmax, m.kmax) + 1):
        tuples, full = _tuples(m.model, k, t_degree, limit, rng)
        if len(tuples) < full:
            rep.note(f"arity {k}: sampled {len(tuples)} of {full} tuples")
        for x in tuples:
            chk.total += 1
            r = ainfty_residual_interval(m, x)
            if not r.is_zero():
                chk.failures.append({"k": k, "alpha": _names(m.model, x), "value": repr(r)})
    return rep


def check_endpoints(m: IsotopyStructure, ends: dict | None = None, times=(0, 1, Fraction(1, 2))) -> Report:
    """Restriction at each time agrees with the structure built from the restricted bulk."""
    rep = Report("endpoint conditions")
    L, ctx = m.model, m.ctx
    ends = dict(ends or {})
    for t in times:
        base = ends.get(t) or m.at(t)
        chk = rep.check(f"operations restrict at t={t}")
        for k in range(m.kmax + 1):
            for a in cartesian(range(L.dim), repeat=k):
                chk.total += 1
                got = _vec_elem(m, m.value(tuple((0, 0, i) for i in a))).restrict(t)
                want = CElement(L, ctx, base.value(a))
                if not (got == want):
                    chk.failures.append({"k": k, "alpha": ", ".join(L.names[i] for i in a),
                                         "got": repr(got), "want": repr(want)})
        rep.record(f"m_-1 restricts at t={t}", m.m_minus1.at(t) == base.m_minus1,
                   {"got": repr(m.m_minus1.at(t)), "want": repr(base.m_minus1)})
        chk = rep.check(f"pairing restricts at t={t}")
        for x, y in cartesian(interval_basis(L, 1), repeat=2):
            chk.total += 1
            ex, ey = _elem(m, x), _elem(m, y)
            lhs = big_pairing(ex, ey).at(t)
            rhs = _cpair(ex.restrict(t), ey.restrict(t))
            if not (lhs == rhs):
                chk.failures.append({"pair": _names(L, (x, y))})
        one = _elem(m, (0, 0, m.unit))
        rep.record(f"unit restricts at t={t}", one.restrict(t) == CElement.basis(L, ctx, m.unit), t)
    return rep


def _cpair(x: CElement, y: CElement) -> RingElement:
    L = x.model
    total = x.ctx.zero()
    for i, a in x.coeffs.items():
        for j, b in y.coeffs.items():
            v = L.pair_basis(i, j)
            if v:
                total = total + (a * b).scale(v)
    return total


def check_interval_cyclic_unital(m: IsotopyStructure, t_degree: int = 1, limit: int | None = 4000,
                                 seed: int = 0) -> Report:
    rep = Report("interval cyclic unital structure")
    L = m.model
    rng = random.Random(seed)
    e = m.unit
    one = _elem(m, (0, 0, e))
    chk = rep.check("cyclic symmetry with boundary term")
    for k in range(1, m.kmax + 1):
        tuples, full = _tuples(L, k + 1, t_degree, limit, rng)
        if len(tuples) < full:
            rep.note(f"cyclic arity {k}: sampled {len(tuples)} of {full} tuples")
        for x in tuples:
            head, last = x[:k], x[k]
            lhs = big_pairing(_vec_elem(m, m.value(head)), _elem(m, last))
            rot = (last,) + head[:-1]
            rhs = big_pairing(_vec_elem(m, m.value(rot)), _elem(m, head[-1]))
            s = (_mono_deg(L, last) + 1) * sum(_mono_deg(L, y) + 1 for y in head) % 2
            if s:
                rhs = -rhs
            if k == 1:
                rhs = rhs + big_pairing(_elem(m, x[0]), _elem(m, x[1])).d()
            chk.total += 1
            if not (lhs == rhs):
                chk.failures.append({"k": k, "alpha": _names(L, x), "lhs": repr(lhs), "rhs": repr(rhs)})
    chk = rep.check("<<m~_k, 1>> = 0 for k != 1, 2")
    for k in range(m.kmax + 1):
        if k in (1, 2):
            continue
        tuples, _ = _tuples(L, k, t_degree, limit, rng)
        for x in tuples:
            chk.total += 1
            v = big_pairing(_vec_elem(m, m.value(x)), one)
            if not v.is_zero():
                chk.failures.append({"k": k, "alpha": _names(L, x), "value": repr(v)})
    chk = rep.check("strong unit")
    for k in range(1, m.kmax + 1):
        tuples, _ = _tuples(L, k - 1, t_degree, limit, rng)
        for rest in tuples:
            for pos in range(k):
                x = rest[:pos] + ((0, 0, e),) + rest[pos:]
                got = m.value(x)
                if k == 2:
                    y = rest[0]
                    s = 1 if pos == 0 or _mono_deg(L, y) % 2 == 0 else -1
                    want = {y: m.ctx.constant(s)}
                else:
                    want = {}
                chk.total += 1
                if got != want:
                    chk.failures.append({"k": k, "alpha": _names(L, x), "value": repr(_vec_elem(m, got))})
    return rep


def check_pseudo_isotopy(m: IsotopyStructure, start=None, end=None, kmax: int = 3, t_degree: int = 1,
                         limit: int | None = 4000, seed: int = 0) -> Report:
    rep = Report("pseudo-isotopy")
    ends = {}
    if start is not None:
        ends[0] = start
    if end is not None:
        ends[1] = end
    rep.merge(check_interval_ainfty(m, kmax, t_degree, limit, seed))
    rep.merge(check_interval_cyclic_unital(m, t_degree, limit, seed))
    rep.merge(check_endpoints(m, ends))
    return rep


def sphere_term(m: IsotopyStructure) -> IntervalAlgebra:
    """sum_l 1/l! p_* i^* q~_{empty,l}(gamma~^l)."""
    data = m.data
    L = data.L
    out = IntervalAlgebra(m.ctx)
    rel = set(data.pair.relative)
    for (beta, l), table in data.sphere.items():
        weights = m._weights.get(l, {})
        Tb = m.ctx.T(beta)
        for g, xvec in table.items():
            if not all(i in rel for i in g):
                continue
            v = L.integrate(data.pair.restrict(xvec))
            if not v:
                continue
            for (e, p), w in weights.get(g, {}).items():
                c = (Tb * w).scale(v)
                if e and FIBER_ORIENTATION * data.n % 2:
                    c = -c
                out = out + IntervalAlgebra.scalar(c, e, p)
    return out


def uniform_residual(m: IsotopyStructure, x: tuple) -> IntervalAlgebra:
    """d<<m~_k(x_1..x_k), x_{k+1}>> minus the signed sum of paired compositions."""
    L = m.model
    k = len(x) - 1
    degs = [_mono_deg(L, y) for y in x]
    lhs = big_pairing(_vec_elem(m, m.value(x[:k])), _elem(m, x[k])).d()
    rhs = IntervalAlgebra(m.ctx)
    for k1 in range(1, k + 2):
        k2 = k + 1 - k1
        if k1 > m.kmax or k2 > m.kmax:
            continue
        for i in range(1, k1 + 1):
            inner = x[i - 1:i - 1 + k2]
            outer = x[i - 1 + k2:] + x[:i - 1]
            term = big_pairing(_vec_elem(m, m.value(outer)), _vec_elem(m, m.value(inner)))
            if term.is_zero():
                continue
            rhs = rhs + (-term if isotopy_nu(degs, k2, i) else term)
    return lhs - rhs


def minus1_uniform_residual(m: IsotopyStructure) -> IntervalAlgebra:
    m0 = _vec_elem(m, m.value(()))
    half = big_pairing(m0, m0).scale(Fraction(1, 2))
    if m.n % 2:
        half = -half
    gw = sphere_term(m)
    if m.data.gw_sign < 0:
        gw = -gw
    return m.m_minus1.d() - half - gw


def check_uniform_relations(m: IsotopyStructure, kmax: int = 3, t_degree: int = 1, limit: int | None = 4000,
                            seed: int = 0) -> Report:
    rep = Report("uniform relations")
    L = m.model
    rng = random.Random(seed)
    chk = rep.check("paired relation")
    for k in range(min(kmax, m.kmax) + 1):
        tuples, full = _tuples(L, k + 1, t_degree, limit, rng)
        if len(tuples) < full:
            rep.note(f"uniform arity {k}: sampled {len(tuples)} of {full} tuples")
        for x in tuples:
            chk.total += 1
            r = uniform_residual(m, x)
            if not r.is_zero():
                chk.failures.append({"k": k, "alpha": _names(L, x), "value": repr(r)})
    r = minus1_uniform_residual(m)
    label = "scalar relation" + (f" (gw sign {m.data.gw_sign:+d})" if m.data.sphere else " (no sphere channel)")
    rep.record(label, r.is_zero(), {"value": repr(r)})
    return rep


def check_stokes(model: CDGAModel, ctx: RingContext, t_degree: int = 3) -> Report:
    """Integral of d<<x, y>> over [0,1] equals the difference of the endpoint pairings."""
    rep = Report("Stokes identity")
    chk = rep.check("integral of d<<x, y>> = <x, y>|_1 - <x, y>|_0")
    basis = interval_basis(model, t_degree)
    for x, y in cartesian(basis, repeat=2):
        ex = IntervalElement.basis(model, ctx, *x)
        ey = IntervalElement.basis(model, ctx, *y)
        lhs = big_pairing(ex, ey).d().integral()
        rhs = _cpair(ex.restrict(1), ey.restrict(1)) - _cpair(ex.restrict(0), ey.restrict(0))
        chk.total += 1
        if not (lhs == rhs):
            chk.failures.append({"pair": _names(model, (x, y))})
    return rep
