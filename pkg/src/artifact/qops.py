"""Correlator tensors, the operators built from them, and their checkers.

Stored disk tensors are raw push-forward values; the sign (-1)^epsilon is
applied once, when the signed view of the data is formed.  Energy-zero
operators are never stored: they are generated from the models.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from itertools import combinations, permutations, product as cartesian
from math import factorial
from typing import Iterable, Sequence

from .dgmodel import CDGAModel, CElement, RelativePairModel, vec_clean
from .novikov import DegreeLattice, FormalVariableSpec, RingContext, RingElement
from .report import Report
from .signs import Partition3, SplitIJ, epsilon, iota, koszul_sign

Slot = tuple  # (beta, k, l)


class DataError(ValueError):
    pass


def out_degree(adegs: Sequence[int], gdegs: Sequence[int], mu: int, k: int, l: int) -> int:
    return sum(adegs) + sum(gdegs) - mu - k - 2 * l + 2


def _add_into(target: dict, vec: dict, coeff):
    for i, v in vec.items():
        x = target.get(i, 0) + coeff * v
        if x:
            target[i] = x
        else:
            target.pop(i, None)


class CorrelatorData:
    """Disk tensors q^beta_{k,l} (k >= -1) and sphere tensors, inside a truncation box."""

    def __init__(self, pair: RelativePairModel, lattice: DegreeLattice, cutoff, kmax: int, lmax: int,
                 disk: dict | None = None, sphere: dict | None = None, gw_sign: int = 1):
        self.pair = pair
        self.L: CDGAModel = pair.l
        self.X: CDGAModel = pair.x
        self.n = self.L.n
        self.lattice = lattice
        self.cutoff = Fraction(cutoff)
        self.kmax = int(kmax)
        self.lmax = int(lmax)
        if gw_sign not in (1, -1):
            raise DataError("gw_sign must be +1 or -1")
        self.gw_sign = gw_sign
        self.disk = {}
        for slot, entries in (disk or {}).items():
            beta, k, l = slot
            slot = (tuple(beta), int(k), int(l))
            clean = {}
            for key, val in entries.items():
                a, g = tuple(key[0]), tuple(key[1])
                if k == -1:
                    val = Fraction(val)
                    if val:
                        clean[(a, g)] = val
                else:
                    val = vec_clean(val)
                    if val:
                        clean[(a, g)] = val
            if clean:
                self.disk[slot] = clean
        self.sphere = {}
        for (beta, l), entries in (sphere or {}).items():
            clean = {tuple(g): vec_clean(v) for g, v in entries.items() if vec_clean(v)}
            if clean:
                self.sphere[(tuple(beta), int(l))] = clean
        self.validate()
        self._view = None

    @property
    def beta0(self):
        return self.lattice.zero

    def betas(self) -> list:
        return self.lattice.elements(self.cutoff)

    def in_box(self, beta, k, l) -> bool:
        return self.lattice.omega(beta) <= self.cutoff and -1 <= k <= self.kmax and 0 <= l <= self.lmax

    def slots(self, include_minus1=False) -> list[Slot]:
        ks = range(-1 if include_minus1 else 0, self.kmax + 1)
        return [(b, k, l) for b in self.betas() for k in ks for l in range(self.lmax + 1)]

    def validate(self):
        L, X = self.L, self.X
        rel = set(self.pair.relative)
        for slot, entries in self.disk.items():
            beta, k, l = slot
            try:
                self.lattice.check(beta)
            except ValueError as exc:
                raise DataError(f"slot {slot}: {exc}") from None
            if beta == self.beta0:
                raise DataError(f"slot {slot}: energy-zero operators are fixed and may not be stored")
            if not self.in_box(beta, k, l):
                raise DataError(f"slot {slot}: outside the truncation box")
            mu = self.lattice.mu(beta)
            for (a, g), val in entries.items():
                if len(a) != max(k, 0) or len(g) != l:
                    raise DataError(f"slot {slot}: key {a};{g} has wrong arity")
                for i in a:
                    if not 0 <= i < L.dim:
                        raise DataError(f"slot {slot}: boundary index {i} out of range")
                for i in g:
                    if i not in rel:
                        raise DataError(f"slot {slot}: interior index {i} is not a relative basis element")
                adegs = [L.degrees[i] for i in a]
                gdegs = [X.degrees[i] for i in g]
                if k == -1:
                    if sum(gdegs) - mu - 2 * l + 3 != self.n:
                        raise DataError(f"slot {slot}: degree law violated at {g}")
                    continue
                want = out_degree(adegs, gdegs, mu, k, l)
                for o in val:
                    if not 0 <= o < L.dim:
                        raise DataError(f"slot {slot}: output index {o} out of range")
                    if L.degrees[o] != want:
                        raise DataError(
                            f"slot {slot}: degree law violated at {_names(L, a)};{_names(X, g)} "
                            f"(output {L.names[o]} has degree {L.degrees[o]}, expected {want})")
        for (beta, l), entries in self.sphere.items():
            if beta == self.beta0 and l in (0, 1):
                raise DataError(f"sphere slot {(beta, l)}: fixed to zero")
            if self.lattice.omega(beta) > self.cutoff or l > self.lmax:
                raise DataError(f"sphere slot {(beta, l)}: outside the truncation box")
            mu = self.lattice.mu(beta)
            for g, val in entries.items():
                if len(g) != l or any(not 0 <= i < X.dim for i in g):
                    raise DataError(f"sphere slot {(beta, l)}: bad key {g}")
                want = sum(X.degrees[i] for i in g) - mu - 2 * l + 4
                for o in val:
                    if X.degrees[o] != want:
                        raise DataError(f"sphere slot {(beta, l)}: degree law violated at {_names(X, g)}")

    def replace(self, disk=None, sphere=None, gw_sign=None) -> "CorrelatorData":
        return CorrelatorData(self.pair, self.lattice, self.cutoff, self.kmax, self.lmax,
                              self.disk if disk is None else disk,
                              self.sphere if sphere is None else sphere,
                              self.gw_sign if gw_sign is None else gw_sign)

    def view(self) -> "SignedView":
        if self._view is None:
            self._view = SignedView.from_data(self)
        return self._view

    def coefficient_count(self) -> int:
        total = 0
        for entries in self.disk.values():
            for v in entries.values():
                total += 1 if isinstance(v, Fraction) else len(v)
        return total


def _names(model, idx) -> str:
    return "(" + ",".join(model.names[i] for i in idx) + ")"


def pinned_tables(pair: RelativePairModel, kmax: int) -> dict:
    """Signed energy-zero operators: differential, signed wedge, signed restriction."""
    L, X = pair.l, pair.x
    out = {}
    if kmax >= 1:
        out[(1, 0)] = {((i,), ()): dict(v) for i, v in L.d.items() if v}
    if kmax >= 2:
        table = {}
        for (i, j), v in L.mult.items():
            s = -1 if L.degrees[i] % 2 else 1
            table[((i, j), ())] = {o: s * c for o, c in v.items()}
        out[(2, 0)] = table
    table = {}
    for g in pair.relative:
        r = pair.restrict({g: Fraction(1)})
        if r:
            s = -1 if (X.degrees[g] + 1) % 2 else 1
            table[((), (g,))] = {o: s * c for o, c in r.items()}
    out[(0, 1)] = table
    return out


class SignedView:
    """The q-values themselves, keyed by slot, with an index for composition."""

    def __init__(self, pair, lattice, n, kmax, lmax, cutoff, slots: dict, minus1: dict, sphere: dict, gw_sign: int):
        self.pair = pair
        self.L, self.X = pair.l, pair.x
        self.lattice = lattice
        self.n = n
        self.kmax = kmax
        self.lmax = lmax
        self.cutoff = cutoff
        self.slots = slots
        self.minus1 = minus1
        self.sphere = sphere
        self.gw_sign = gw_sign
        self._index: dict = {}
        rel = pair.relative
        dT = defaultdict(list)
        for c in rel:
            for c2, v in self.X.d.get(c, {}).items():
                dT[c2].append((c, v))
        self.dT = dict(dT)

    @classmethod
    def from_data(cls, data: CorrelatorData) -> "SignedView":
        L, X, n = data.L, data.X, data.n
        slots = {}
        minus1 = {}
        b0 = data.beta0
        for (k, l), table in pinned_tables(data.pair, data.kmax).items():
            if l <= data.lmax and table:
                slots[(b0, k, l)] = table
        for slot, entries in data.disk.items():
            beta, k, l = slot
            if k == -1:
                signed = {}
                for (a, g), v in entries.items():
                    e = epsilon((), [X.degrees[i] for i in g], n, k=-1)
                    signed[g] = e.sign * v
                minus1[(beta, l)] = signed
                continue
            signed = {}
            for (a, g), v in entries.items():
                e = epsilon([L.degrees[i] for i in a], [X.degrees[i] for i in g], n)
                signed[(a, g)] = {o: e.sign * c for o, c in v.items()} if e else dict(v)
            slots[slot] = signed
        return cls(data.pair, data.lattice, n, data.kmax, data.lmax, data.cutoff, slots, minus1,
                   dict(data.sphere), data.gw_sign)

    def get(self, slot) -> dict:
        return self.slots.get(slot, {})

    def set_slot(self, slot, entries: dict):
        if entries:
            self.slots[slot] = entries
        else:
            self.slots.pop(slot, None)
        self._index.pop(slot, None)

    def index(self, slot) -> dict:
        """(position, index at that position) -> list of (a, g, vec)."""
        if slot not in self._index:
            idx = defaultdict(list)
            for (a, g), vec in self.slots.get(slot, {}).items():
                for pos, c in enumerate(a):
                    idx[(pos, c)].append((a, g, vec))
            self._index[slot] = dict(idx)
        return self._index[slot]

    def in_box(self, beta, k, l) -> bool:
        return self.lattice.omega(beta) <= self.cutoff and k <= self.kmax and l <= self.lmax


def slot_residual(view: SignedView, target: Slot) -> dict:
    """All terms of the q-relation at one slot, keyed by (a, g) -> output vector."""
    beta, k, l = target
    L, X = view.L, view.X
    Ld, Xd = L.degrees, X.degrees
    res: dict = defaultdict(dict)
    # interior differential term
    for (a, g), vec in view.get(target).items():
        run = 0
        for j, c2 in enumerate(g):
            for c, coef in view.dT.get(c2, ()):
                key = (a, g[:j] + (c,) + g[j + 1:])
                _add_into(res[key], vec, -coef if run % 2 else coef)
            run += Xd[c2]
    # compositions
    lattice = view.lattice
    for b1, b2 in lattice.decompositions(beta):
        for i2 in range(k + 1):
            k1 = k - i2 + 1
            if k1 > view.kmax:
                continue
            for l2 in range(l + 1):
                l1 = l - l2
                outer, inner = (b1, k1, l1), (b2, i2, l2)
                inner_entries = view.slots.get(inner)
                if not inner_entries or not view.slots.get(outer):
                    continue
                oidx = view.index(outer)
                splits = [(I, tuple(j for j in range(l) if j not in I)) for I in combinations(range(l), l1)]
                for (mid, gJ), ivec in inner_entries.items():
                    for c, v in ivec.items():
                        for i1 in range(k1):
                            for a_o, gI, ovec in oidx.get((i1, c), ()):
                                a = a_o[:i1] + mid + a_o[i1 + 1:]
                                adegs = [Ld[i] for i in a]
                                for I, J in splits:
                                    g = [0] * l
                                    for p, x in zip(I, gI):
                                        g[p] = x
                                    for p, x in zip(J, gJ):
                                        g[p] = x
                                    g = tuple(g)
                                    s = iota(adegs, [Xd[i] for i in g], Partition3(k, i1, i2), SplitIJ(l, I, J))
                                    _add_into(res[(a, g)], ovec, -v if s else v)
    return {key: vec for key, vec in res.items() if vec}


def minus1_residual(view: SignedView, beta, l: int) -> dict:
    """Terms of the scalar relation at (beta, l), keyed by the interior tuple."""
    L, X = view.L, view.X
    Xd = X.degrees
    res: dict = defaultdict(Fraction)
    for g, val in view.minus1.get((beta, l), {}).items():
        run = 0
        for j, c2 in enumerate(g):
            for c, coef in view.dT.get(c2, ()):
                key = g[:j] + (c,) + g[j + 1:]
                res[key] += (-coef if run % 2 else coef) * val
            run += Xd[c2]
    half = Fraction(1, 2)
    for b1, b2 in view.lattice.decompositions(beta):
        for l1 in range(l + 1):
            l2 = l - l1
            e1 = view.get((b1, 0, l1))
            e2 = view.get((b2, 0, l2))
            if not e1 or not e2:
                continue
            for I in combinations(range(l), l1):
                J = tuple(j for j in range(l) if j not in I)
                for (_, gI), v1 in e1.items():
                    for (_, gJ), v2 in e2.items():
                        p = L.pair(v1, v2)
                        if not p:
                            continue
                        g = [0] * l
                        for q, x in zip(I, gI):
                            g[q] = x
                        for q, x in zip(J, gJ):
                            g[q] = x
                        g = tuple(g)
                        gdegs = [Xd[i] for i in g]
                        s = int(_koszul(I, J, gdegs)) + sum(Xd[i] for i in gJ)
                        res[g] += (half if s % 2 else -half) * p
    rel = set(view.pair.relative)
    for g, xvec in view.sphere.get((beta, l), {}).items():
        if all(i in rel for i in g):
            res[g] += view.gw_sign * L.integrate(view.pair.restrict(xvec))
    return {g: v for g, v in res.items() if v}


def _koszul(I, J, degs):
    return koszul_sign(SplitIJ(len(degs), tuple(I), tuple(J)), degs)


# -- counting the size of the examined domain


def _degree_counts(degrees: Sequence[int], arity: int) -> dict:
    counts = {0: 1}
    for _ in range(arity):
        nxt = defaultdict(int)
        for s, c in counts.items():
            for d in degrees:
                nxt[s + d] += c
        counts = nxt
    return dict(counts)


def domain_size(view: SignedView, slot: Slot) -> int:
    """Number of basis tuples whose residual lands in degrees 0..n."""
    beta, k, l = slot
    mu = view.lattice.mu(beta)
    a_counts = _degree_counts(view.L.degrees, k)
    g_counts = _degree_counts([view.X.degrees[i] for i in view.pair.relative], l)
    total = 0
    for sa, ca in a_counts.items():
        for sg, cg in g_counts.items():
            if 0 <= out_degree([sa], [sg], mu, k, l) + 1 <= view.n:
                total += ca * cg
    return total


def check_q_relations(data: CorrelatorData, slots: Iterable[Slot] | None = None) -> Report:
    view = data.view()
    rep = Report("q-relations")
    chk = rep.check("q-relation")
    L, X = data.L, data.X
    for slot in (data.slots() if slots is None else slots):
        res = slot_residual(view, slot)
        chk.total += domain_size(view, slot)
        for (a, g), vec in sorted(res.items()):
            chk.failures.append({"slot": _slot_str(slot), "alpha": _names(L, a), "gamma": _names(X, g),
                                 "value": _vec_str(L, vec)})
    return rep


def check_q_minus1_relations(data: CorrelatorData) -> Report:
    rep = Report("scalar relations")
    view = data.view()
    chk = rep.check(f"scalar relation (gw sign {data.gw_sign:+d})")
    other = data.replace(gw_sign=-data.gw_sign).view() if data.sphere else None
    works = {data.gw_sign: True, -data.gw_sign: other is not None}
    rel_degs = [data.X.degrees[i] for i in data.pair.relative]
    for beta in data.betas():
        for l in range(data.lmax + 1):
            res = minus1_residual(view, beta, l)
            chk.total += sum(c for s, c in _degree_counts(rel_degs, l).items()
                             if s - data.lattice.mu(beta) - 2 * l + 3 == data.n - 1)
            for g, v in sorted(res.items()):
                chk.failures.append({"beta": beta, "l": l, "gamma": _names(data.X, g), "value": v})
            if res:
                works[data.gw_sign] = False
            if other is not None and minus1_residual(other, beta, l):
                works[-data.gw_sign] = False
    if data.sphere:
        good = [f"{s:+d}" for s in (1, -1) if works[s]]
        rep.note("sign flags satisfying the scalar relation: " + (", ".join(good) if good else "none"))
    return rep


def check_chain_map(data: CorrelatorData) -> Report:
    rep = Report("sphere chain map")
    chk = rep.check("sphere operator commutes with d")
    X = data.X
    dT = defaultdict(list)
    for c in range(X.dim):
        for c2, v in X.d.get(c, {}).items():
            dT[c2].append((c, v))
    for beta in data.betas():
        for l in range(data.lmax + 1):
            entries = data.sphere.get((beta, l), {})
            lhs: dict = defaultdict(dict)
            for g, vec in entries.items():
                _add_into(lhs[g], X.apply_d(vec), 1)
                run = 0
                for j, c2 in enumerate(g):
                    for c, coef in dT.get(c2, ()):
                        key = g[:j] + (c,) + g[j + 1:]
                        _add_into(lhs[key], vec, coef if run % 2 else -coef)
                    run += X.degrees[c2]
            chk.total += max(len(lhs), 1) if entries else 0
            for g, vec in sorted(lhs.items()):
                if vec:
                    chk.failures.append({"beta": beta, "l": l, "gamma": _names(X, g), "value": _vec_str(X, vec)})
    return rep


def _slot_str(slot) -> str:
    beta, k, l = slot
    return f"beta={list(beta)},k={k},l={l}"


def _vec_str(model, vec) -> str:
    return " + ".join(f"{c}*{model.names[i]}" for i, c in sorted(vec.items()))


# -- evaluation on elements


def eval_q(data: CorrelatorData, beta, k: int, l: int, alphas: Sequence[CElement], gammas: Sequence[CElement]) -> CElement:
    if k < 0:
        raise ValueError("use eval_q_minus1 for k = -1")
    if len(alphas) != k or len(gammas) != l:
        raise ValueError("arity mismatch")
    if not data.in_box(tuple(beta), k, l):
        raise ValueError(f"slot {(beta, k, l)} outside the truncation box")
    ctx = (alphas[0].ctx if alphas else gammas[0].ctx) if (alphas or gammas) else None
    entries = data.view().get((tuple(beta), k, l))
    if ctx is None:
        raise ValueError("need a ring context; pass eval_q_basis for nullary slots")
    out: dict = {}
    for (a, g), vec in entries.items():
        coeff = ctx.one()
        for x, i in zip(alphas, a):
            coeff = coeff * x.coeffs.get(i, ctx.zero())
            if coeff.is_zero():
                break
        else:
            for x, i in zip(gammas, g):
                coeff = coeff * x.coeffs.get(i, ctx.zero())
                if coeff.is_zero():
                    break
        if coeff.is_zero():
            continue
        for o, c in vec.items():
            term = coeff.scale(c)
            out[o] = out[o] + term if o in out else term
    return CElement(data.L, ctx, out)


def eval_q_basis(data: CorrelatorData, beta, k: int, l: int, a: Sequence[int], g: Sequence[int]) -> dict:
    return dict(data.view().get((tuple(beta), k, l)).get((tuple(a), tuple(g)), {}))


def eval_q_minus1(data: CorrelatorData, beta, l: int, gammas: Sequence[CElement]) -> RingElement:
    ctx = gammas[0].ctx if gammas else None
    table = data.view().minus1.get((tuple(beta), l), {})
    if ctx is None:
        raise ValueError("need a ring context")
    total = ctx.zero()
    for g, v in table.items():
        coeff = ctx.constant(v)
        for x, i in zip(gammas, g):
            coeff = coeff * x.coeffs.get(i, ctx.zero())
        total = total + coeff
    return total


def eval_q_sphere(data: CorrelatorData, beta, l: int, gammas: Sequence[CElement]) -> CElement:
    ctx = gammas[0].ctx if gammas else None
    if ctx is None:
        raise ValueError("need a ring context")
    out: dict = {}
    for g, vec in data.sphere.get((tuple(beta), l), {}).items():
        coeff = ctx.one()
        for x, i in zip(gammas, g):
            coeff = coeff * x.coeffs.get(i, ctx.zero())
        if coeff.is_zero():
            continue
        for o, c in vec.items():
            term = coeff.scale(c)
            out[o] = out[o] + term if o in out else term
    return CElement(data.X, ctx, out)


# -- the A-infinity structure


class AInftyStructure:
    """Operations m_0..m_kmax on basis tuples with ring coefficients, plus the scalar m_{-1}."""

    def __init__(self, model: CDGAModel, ctx: RingContext, ops: dict, m_minus1: RingElement | None = None, kmax: int | None = None):
        self.model = model
        self.ctx = ctx
        self.ops = {k: {tuple(a): {o: c for o, c in v.items() if not c.is_zero()} for a, v in table.items()}
                    for k, table in ops.items()}
        self.ops = {k: {a: v for a, v in t.items() if v} for k, t in self.ops.items()}
        self.kmax = max(ops, default=0) if kmax is None else kmax
        self.m_minus1 = ctx.zero() if m_minus1 is None else m_minus1
        self.unit = model.unit
        self._index = {}

    def table(self, k: int) -> dict:
        return self.ops.get(k, {})

    def value(self, a: Sequence[int]) -> dict:
        return self.ops.get(len(a), {}).get(tuple(a), {})

    def index(self, k: int) -> dict:
        if k not in self._index:
            idx = defaultdict(list)
            for a, vec in self.ops.get(k, {}).items():
                for pos, c in enumerate(a):
                    idx[(pos, c)].append((a, vec))
            self._index[k] = dict(idx)
        return self._index[k]

    def apply(self, inputs: Sequence[CElement]) -> CElement:
        k = len(inputs)
        out: dict = {}
        for a, vec in self.table(k).items():
            coeff = self.ctx.one()
            for x, i in zip(inputs, a):
                coeff = coeff * x.coeffs.get(i, self.ctx.zero())
                if coeff.is_zero():
                    break
            if coeff.is_zero():
                continue
            for o, c in vec.items():
                term = coeff * c
                out[o] = out[o] + term if o in out else term
        return CElement(self.model, self.ctx, out)

    def reduced(self) -> dict:
        """Constant terms of every operation: {k: {a: {o: Fraction}}}."""
        out = {}
        for k, table in self.ops.items():
            red = {}
            for a, vec in table.items():
                v = {o: c.reduce() for o, c in vec.items() if c.reduce()}
                if v:
                    red[a] = v
            if red:
                out[k] = red
        return out


def _check_bulk(data: CorrelatorData, gamma: CElement):
    X = data.X
    if gamma.model is not X:
        raise ValueError("bulk element must live in the ambient model")
    if not data.pair.is_relative(gamma.coeffs):
        raise ValueError("bulk element is not relative")
    if not gamma.d().is_zero():
        raise ValueError("bulk element is not closed")
    if gamma.degrees() - {2}:
        raise ValueError("bulk element must have total degree 2")
    if not gamma.is_zero() and not gamma.valuation() > 0:
        raise ValueError("bulk element must have positive valuation")
    if not gamma.is_zero() and (data.lmax + 1) * gamma.valuation() <= gamma.ctx.cutoff:
        raise ValueError("interior arity cap is too small for this bulk element and cutoff")


def _powers(gamma: CElement, l: int) -> dict:
    """Coefficients of gamma^{tensor l}: {g tuple: RingElement}."""
    out = {(): gamma.ctx.one()}
    for _ in range(l):
        nxt = {}
        for g, c in out.items():
            for i, ci in gamma.coeffs.items():
                p = c * ci
                if not p.is_zero():
                    nxt[g + (i,)] = p
        out = nxt
    return out


def build_m(data: CorrelatorData, gamma: CElement) -> AInftyStructure:
    _check_bulk(data, gamma)
    ctx = gamma.ctx
    if ctx.lattice != data.lattice:
        raise ValueError("ring context uses a different lattice")
    view = data.view()
    powers = {l: _powers(gamma, l) for l in range(data.lmax + 1)}
    ops: dict = {k: {} for k in range(data.kmax + 1)}
    minus1 = ctx.zero()
    for beta in data.betas():
        Tb = ctx.T(beta)
        for l in range(data.lmax + 1):
            pw = powers[l]
            if not pw:
                continue
            w = Tb.scale(Fraction(1, factorial(l)))
            weights = {g: w * c for g, c in pw.items()}
            for k in range(data.kmax + 1):
                for (a, g), vec in view.get((beta, k, l)).items():
                    c = weights.get(g)
                    if c is None or c.is_zero():
                        continue
                    slot = ops[k].setdefault(a, {})
                    for o, v in vec.items():
                        term = c.scale(v)
                        slot[o] = slot[o] + term if o in slot else term
            for g, v in view.minus1.get((beta, l), {}).items():
                c = weights.get(g)
                if c is not None:
                    minus1 = minus1 + c.scale(v)
    return AInftyStructure(data.L, ctx, ops, minus1, kmax=data.kmax)


def ainfty_residual(m: AInftyStructure, k: int) -> dict:
    """Sparse composition of the A-infinity relation of arity k: {a: {o: RingElement}}."""
    L = m.model
    Ld = L.degrees
    res: dict = defaultdict(dict)
    for i2 in range(k + 1):
        k1 = k - i2 + 1
        if k1 > m.kmax:
            continue
        outer_idx = m.index(k1)
        for mid, ivec in m.table(i2).items():
            for c, v in ivec.items():
                for i1 in range(k1):
                    for a_o, ovec in outer_idx.get((i1, c), ()):
                        a = a_o[:i1] + mid + a_o[i1 + 1:]
                        s = sum(Ld[x] + 1 for x in a[:i1]) % 2
                        coeff = -v if s else v
                        target = res[a]
                        for o, w in ovec.items():
                            term = coeff * w
                            target[o] = target[o] + term if o in target else term
    out = {}
    for a, vec in res.items():
        vec = {o: c for o, c in vec.items() if not c.is_zero()}
        if vec:
            out[a] = vec
    return out


def ainfty_residual_bruteforce(m: AInftyStructure, k: int) -> dict:
    """Direct evaluation over every basis tuple; independent of the sparse indices."""
    L = m.model
    dim = L.dim
    zero = m.ctx.zero()
    out = {}
    for a in cartesian(range(dim), repeat=k):
        total = {}
        for start in range(k + 1):
            for stop in range(start, k + 1):
                inner = m.ops.get(stop - start, {}).get(a[start:stop], {})
                if not inner:
                    continue
                k1 = k - (stop - start) + 1
                if k1 > m.kmax:
                    continue
                sign = 1
                for x in a[:start]:
                    if (L.degrees[x] + 1) % 2:
                        sign = -sign
                outer_table = m.ops.get(k1, {})
                for c in range(dim):
                    coeff = inner.get(c, zero)
                    if coeff.is_zero():
                        continue
                    key = a[:start] + (c,) + a[stop:]
                    for o, w in outer_table.get(key, {}).items():
                        term = (coeff * w).scale(sign)
                        total[o] = total[o] + term if o in total else term
        total = {o: c for o, c in total.items() if not c.is_zero()}
        if total:
            out[a] = total
    return out


def check_ainfty(m: AInftyStructure, kmax: int | None = None) -> Report:
    kmax = m.kmax if kmax is None else kmax
    rep = Report("A-infinity relations")
    chk = rep.check("A-infinity relation")
    L = m.model
    for k in range(kmax + 1):
        res = ainfty_residual(m, k)
        chk.total += L.dim ** k
        for a, vec in sorted(res.items()):
            chk.failures.append({"k": k, "alpha": _names(L, a), "value": _ring_vec_str(L, vec)})
    return rep


def _ring_vec_str(model, vec) -> str:
    return " + ".join(f"({c})*{model.names[i]}" for i, c in sorted(vec.items()))


def pair_values(L: CDGAModel, vec: dict, b: int, ctx: RingContext) -> RingElement:
    """<sum_o vec[o] e_o, e_b> with ring coefficients."""
    total = ctx.zero()
    for o, c in vec.items():
        p = L.pair_basis(o, b)
        if p:
            total = total + c.scale(p)
    return total


def check_cyclic_unital(m: AInftyStructure) -> Report:
    L, ctx = m.model, m.ctx
    Ld = L.degrees
    rep = Report("cyclic unital structure")
    e = m.unit
    dim = L.dim
    # valuation bounds
    m0 = m.value(())
    rep.record("valuation of m_0 positive", all(c.valuation() > 0 for c in m0.values()), {"m0": _ring_vec_str(L, m0)})
    for k, table in m.ops.items():
        for a, vec in table.items():
            rep.record("valuation nondecreasing", all(c.valuation() >= 0 for c in vec.values()), {"k": k, "alpha": _names(L, a)})
    # pairing antisymmetry
    for i, j in cartesian(range(dim), range(dim)):
        s = -1 if ((Ld[i] + 1) * (Ld[j] + 1) + 1) % 2 else 1
        rep.record("pairing antisymmetry", L.pair_basis(i, j) == s * L.pair_basis(j, i), (L.names[i], L.names[j]))
    # cyclic symmetry
    for k in range(1, m.kmax + 1):
        for a in cartesian(range(dim), repeat=k + 1):
            head, last = a[:k], a[k]
            lhs = pair_values(L, m.value(head), last, ctx)
            rot = (last,) + head[:-1]
            rhs = pair_values(L, m.value(rot), head[-1], ctx)
            s = (Ld[last] + 1) * sum(Ld[x] + 1 for x in head) % 2
            rep.record("cyclic symmetry", lhs == (-rhs if s else rhs), {"k": k, "alpha": _names(L, a)})
    # unit pairing
    for k in range(m.kmax + 1):
        if k in (1, 2):
            continue
        for a, vec in m.table(k).items():
            rep.record("<m_k, e> = 0 for k != 1,2", pair_values(L, vec, e, ctx).is_zero(), {"k": k, "alpha": _names(L, a)})
    if m.kmax >= 1:
        for i in range(dim):
            rep.record("<m_1(x), e> = 0", pair_values(L, m.value((i,)), e, ctx).is_zero(), L.names[i])
    if m.kmax >= 2:
        one = ctx.one()
        for i in range(dim):
            left = m.value((e, i))
            right = m.value((i, e))
            s = -1 if Ld[i] % 2 else 1
            rep.record("m_2(e, x) = x", left == {i: one}, L.names[i])
            rep.record("m_2(x, e) = (-1)^|x| x", right == {i: one.scale(s)}, L.names[i])
    for k in range(m.kmax + 1):
        if k == 2:
            continue
        for a, vec in m.table(k).items():
            if e in a:
                rep.record("unit insertions vanish", False, {"k": k, "alpha": _names(L, a)})
    return rep


def check_thm_prop(m: AInftyStructure, data: CorrelatorData, gamma: CElement, t_fund: int, t_div: int, divisor: dict) -> Report:
    """Derivative laws in the two distinguished variables and the reduction to the dg structure."""
    ctx = m.ctx
    L = m.model
    rep = Report("derivative and reduction laws")
    if any(any(beta) for c in gamma.coeffs.values() for beta, _ in c.terms):
        raise ValueError("bulk coefficients must be free of T, otherwise disk classes cannot be told apart")
    dt0 = {i: c.tderiv(t_fund) for i, c in gamma.coeffs.items()}
    dt0 = {i: c for i, c in dt0.items() if not c.is_zero()}
    if dt0 != {data.X.unit: ctx.one()}:
        raise ValueError("bulk element does not have derivative 1 in the fundamental-class variable")
    dt1 = {i: c for i, c in ((i, c.tderiv(t_div)) for i, c in gamma.coeffs.items()) if not c.is_zero()}
    if dt1 != {i: ctx.constant(v) for i, v in divisor.items() if v}:
        raise ValueError("bulk element does not have the stated derivative in the divisor variable")
    exact_below = ctx.cutoff - 1
    unit = L.unit
    for k in range(m.kmax + 1):
        for a in set(m.table(k)) | ({()} if k == 0 else set()):
            vec = m.value(a)
            got = {o: c.tderiv(t_fund).truncate(exact_below) for o, c in vec.items()}
            got = {o: c for o, c in got.items() if not c.is_zero()}
            want = {unit: ctx.constant(-1)} if k == 0 else {}
            rep.record("fundamental class derivative", got == want, {"k": k, "alpha": _names(L, a)})
            for beta in data.betas():
                lhs = {o: c.beta_part(beta).tderiv(t_div).truncate(exact_below) for o, c in vec.items()}
                per = data.pair.period(beta, divisor)
                rhs = {o: c.beta_part(beta).scale(per).truncate(exact_below) for o, c in vec.items()}
                lhs = {o: c for o, c in lhs.items() if not c.is_zero()}
                rhs = {o: c for o, c in rhs.items() if not c.is_zero()}
                rep.record("divisor derivative", lhs == rhs, {"k": k, "beta": beta, "alpha": _names(L, a)})
    red = m.reduced()
    Ld = L.degrees
    for k in range(m.kmax + 1):
        want = {}
        if k == 1:
            want = {(i,): dict(v) for i, v in L.d.items() if v}
        elif k == 2:
            want = {}
            for (i, j), v in L.mult.items():
                s = -1 if Ld[i] % 2 else 1
                want[(i, j)] = {o: s * c for o, c in v.items()}
        got = red.get(k, {})
        for a in sorted(set(want) | set(got)):
            rep.record("reduction is the dg structure", got.get(a, {}) == want.get(a, {}), {"k": k, "alpha": _names(L, a)})
        if not want and not got:
            rep.record("reduction is the dg structure", True)
    return rep


# -- axioms on the tensors themselves


def check_axioms_on_data(data: CorrelatorData) -> Report:
    view = data.view()
    L, X = data.L, data.X
    Ld, Xd = L.degrees, X.degrees
    b0 = data.beta0
    rep = Report("correlator axioms")
    eL, eX = L.unit, X.unit
    # energy zero: nothing stored at beta_0, sphere pinned slots empty
    for slot in data.disk:
        rep.record("energy zero", slot[0] != b0, _slot_str(slot))
    rep.record("energy zero", True)
    # unit
    for slot, entries in view.slots.items():
        beta, k, l = slot
        if slot in ((b0, 2, 0), (b0, 1, 0)):
            continue
        for (a, g) in entries:
            rep.record("unit", eL not in a, {"slot": _slot_str(slot), "alpha": _names(L, a)})
    # fundamental class
    for slot, entries in view.slots.items():
        beta, k, l = slot
        for (a, g), vec in entries.items():
            if eX in g:
                ok = slot == (b0, 0, 1) and vec == {eL: Fraction(-1)}
                rep.record("fundamental class", ok, {"slot": _slot_str(slot), "gamma": _names(X, g)})
    if data.lmax >= 1:
        v = view.get((b0, 0, 1)).get(((), (eX,)), {})
        rep.record("fundamental class", v == {eL: Fraction(-1)}, "q_{0,1}(1) = -1")
    for (beta, l), table in view.minus1.items():
        for g in table:
            rep.record("fundamental class", eX not in g, {"beta": beta, "l": l, "gamma": _names(X, g)})
    # divisor
    for z in data.pair.divisor_basis:
        for beta in data.betas():
            per = data.pair.basis_period(beta, z)
            for k in range(-1, data.kmax + 1):
                for l in range(1, data.lmax + 1):
                    if k == -1:
                        big = view.minus1.get((beta, l), {})
                        small = view.minus1.get((beta, l - 1), {})
                        keys = {g[1:] for g in big if g[0] == z} | set(small)
                        for g in sorted(keys):
                            lhs = big.get((z,) + g, Fraction(0))
                            rhs = per * small.get(g, Fraction(0))
                            rep.record("divisor", lhs == rhs, {"beta": beta, "k": k, "l": l, "gamma": _names(X, (z,) + g)})
                        continue
                    big = view.get((beta, k, l))
                    small = view.get((beta, k, l - 1))
                    keys = {(a, g[1:]) for (a, g) in big if g[0] == z} | set(small)
                    for a, g in sorted(keys):
                        lhs = big.get((a, (z,) + g), {})
                        rhs = {o: per * c for o, c in small.get((a, g), {}).items() if per * c}
                        rep.record("divisor", lhs == rhs, {"slot": _slot_str((beta, k, l)), "alpha": _names(L, a), "gamma": _names(X, (z,) + g)})
    # top degree: the integral of every output vanishes outside the exceptional slots
    exceptional = {(b0, 1, 0), (b0, 0, 1), (b0, 2, 0)}
    for slot, entries in view.slots.items():
        if slot in exceptional:
            continue
        for (a, g), vec in entries.items():
            rep.record("top degree", L.integrate(vec) == 0, {"slot": _slot_str(slot), "alpha": _names(L, a), "gamma": _names(X, g)})
    # interior symmetry
    for slot, entries in view.slots.items():
        beta, k, l = slot
        for (a, g), vec in entries.items():
            gd = [Xd[i] for i in g]
            for perm in set(permutations(range(l))):
                g2 = tuple(g[p] for p in perm)
                s = _perm_parity(perm, gd)
                other = entries.get((a, g2), {})
                rep.record("interior symmetry", other == {o: (-c if s else c) for o, c in vec.items()},
                           {"slot": _slot_str(slot), "alpha": _names(L, a), "gamma": _names(X, g2)})
    for (beta, l), table in view.minus1.items():
        for g, v in table.items():
            gd = [Xd[i] for i in g]
            for perm in set(permutations(range(l))):
                g2 = tuple(g[p] for p in perm)
                s = _perm_parity(perm, gd)
                rep.record("interior symmetry", table.get(g2, 0) == (-v if s else v), {"beta": beta, "l": l, "gamma": _names(X, g2)})
    # cyclic law on the tensors
    for slot, entries in view.slots.items():
        beta, k, l = slot
        if k < 1:
            continue
        keys = set()
        for (a, g) in entries:
            keys.add(g)
        for g in sorted(keys):
            for a in cartesian(range(L.dim), repeat=k + 1):
                head, last = a[:k], a[k]
                lhs = L.pair(entries.get((head, g), {}), {last: 1})
                rot = (last,) + head[:-1]
                rhs = L.pair(entries.get((rot, g), {}), {head[-1]: 1})
                s = (Ld[last] + 1) * sum(Ld[x] + 1 for x in head) % 2
                rep.record("cyclic", lhs == (-rhs if s else rhs), {"slot": _slot_str(slot), "alpha": _names(L, a), "gamma": _names(X, g)})
    return rep


def _perm_parity(perm, degs) -> int:
    """Koszul parity for moving symbols of degrees degs into order perm."""
    total = 0
    for x in range(len(perm)):
        for y in range(x + 1, len(perm)):
            if perm[x] > perm[y]:
                total += degs[perm[x]] * degs[perm[y]]
    return total % 2


def make_context(lattice: DegreeLattice, tdegrees: Sequence[int], cutoff) -> RingContext:
    return RingContext(lattice, FormalVariableSpec(tuple(tdegrees)), Fraction(cutoff))
