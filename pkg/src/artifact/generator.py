"""Order-by-order synthesis of correlator data satisfying the q-relations.

Each unknown tensor is solved from the relation at its own slot, where it
enters only through the differential of the multilinear-map complex.  The
homotopy of that complex comes from homotopies on the two models.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product as cartesian
from math import factorial

from .affine import Affine, LinearSystem, substitute
from .dgmodel import CDGAModel, RelativePairModel, retract
from .novikov import DegreeLattice, format_fraction
from .qops import (CorrelatorData, SignedView, _add_into, _perm_parity, check_axioms_on_data,
                   check_q_minus1_relations, check_q_relations, minus1_residual, out_degree,
                   slot_residual)
from .report import Report
from .signs import epsilon


@dataclass
class GeneratorOptions:
    seed: int = 0
    exact_noise: bool = True
    harmonic_noise: bool = True
    cyclic: bool = True
    noise_range: int = 2
    density: float = 0.5
    # per lattice generator: degree -1 contraction on harmonic basis elements
    contractions: list | None = None


@dataclass
class GenerationResult:
    data: CorrelatorData
    report: Report
    order: list
    provenance: dict = field(default_factory=dict)


class LocalComplex:
    """A complex on a subset of basis indices, with its own retraction."""

    def __init__(self, indices, degrees_of, d_of):
        self.indices = tuple(indices)
        pos = {i: p for p, i in enumerate(self.indices)}
        self.degree = {i: degrees_of(i) for i in self.indices}
        self.d = {}
        for i in self.indices:
            img = {j: c for j, c in d_of(i).items() if j in pos}
            if img:
                self.d[i] = img
        local_d = {pos[i]: {pos[j]: c for j, c in v.items()} for i, v in self.d.items()}
        h, p, _ = retract([self.degree[i] for i in self.indices], local_d)
        back = self.indices
        self.h = {back[i]: {back[j]: c for j, c in v.items()} for i, v in h.items()}
        self.p = {back[i]: {back[j]: c for j, c in v.items()} for i, v in p.items()}


def _tensor_apply(factors):
    """Expand a tensor product of sparse vectors: list of {index: c} -> {tuple: c}."""
    out = {(): Fraction(1)}
    for vec in factors:
        nxt = {}
        for key, c in out.items():
            for i, v in vec.items():
                nxt[key + (i,)] = nxt.get(key + (i,), 0) + c * v
        out = {k: v for k, v in nxt.items() if v}
        if not out:
            break
    return out


class SlotSpace:
    """Free input tuples of one slot and the tensor-complex operators on them."""

    def __init__(self, gen: "Generator", beta, k: int, l: int):
        self.gen = gen
        self.beta, self.k, self.l = beta, k, l
        self.mu = gen.lattice.mu(beta)

    def factors(self):
        return [self.gen.xc] * self.l + [self.gen.lc] * self.k

    def shifted(self, slot_kind, idx):
        return self.gen.X.degrees[idx] if slot_kind == "g" else self.gen.L.degrees[idx] + 1

    def split(self, v):
        return v[self.l:], v[:self.l]

    def join(self, a, g):
        return tuple(g) + tuple(a)

    def vdegs(self, v):
        X, L = self.gen.X, self.gen.L
        return [X.degrees[i] for i in v[:self.l]] + [L.degrees[i] + 1 for i in v[self.l:]]

    def d_V(self, v) -> dict:
        out = {}
        run = 0
        degs = self.vdegs(v)
        facs = self.factors()
        for j, i in enumerate(v):
            for c, coef in facs[j].d.get(i, {}).items():
                key = v[:j] + (c,) + v[j + 1:]
                out[key] = out.get(key, 0) + (-coef if run % 2 else coef)
            run += degs[j]
        return {k: c for k, c in out.items() if c}

    def h_V(self, v) -> dict:
        out = {}
        run = 0
        degs = self.vdegs(v)
        facs = self.factors()
        for j in range(len(v)):
            parts = [facs[i].p.get(v[i], {}) for i in range(j)]
            parts.append(facs[j].h.get(v[j], {}))
            parts.extend({v[i]: Fraction(1)} for i in range(j + 1, len(v)))
            for key, c in _tensor_apply(parts).items():
                out[key] = out.get(key, 0) + (-c if run % 2 else c)
            run += degs[j]
        return {k: c for k, c in out.items() if c}

    def P_V(self, v) -> dict:
        facs = self.factors()
        return _tensor_apply([facs[i].p.get(v[i], {}) for i in range(len(v))])


class Generator:
    def __init__(self, pair: RelativePairModel, lattice: DegreeLattice, cutoff, kmax: int, lmax: int,
                 options: GeneratorOptions | None = None):
        self.pair = pair
        self.L: CDGAModel = pair.l
        self.X: CDGAModel = pair.x
        self.n = self.L.n
        self.lattice = lattice
        self.cutoff = Fraction(cutoff)
        self.kmax, self.lmax = kmax, lmax
        self.opts = options or GeneratorOptions()
        self.rng = random.Random(self.opts.seed)
        L, X = self.L, self.X
        for i, v in L.d.items():
            if L.unit in v:
                raise ValueError("the differential hits the unit; unit-normalized tensors are not a subcomplex")
        self.Z = pair.divisor_basis
        rel = set(pair.relative)
        self.free_L = tuple(i for i in range(L.dim) if i != L.unit)
        self.free_X = tuple(i for i in pair.relative if i != X.unit and i not in self.Z)
        for i in pair.relative:
            for j in X.d.get(i, {}):
                if j not in rel:
                    raise ValueError("relative subspace is not closed under d")
        self.lc = LocalComplex(self.free_L, lambda i: L.degrees[i], lambda i: L.d.get(i, {}))
        self.xc = LocalComplex(self.free_X, lambda i: X.degrees[i], lambda i: X.d.get(i, {}))
        self.hW, self.pW, _ = L.sdr()
        G = L.pairing_matrix()
        if G.rank() != L.dim:
            raise ValueError("pairing on the boundary model is degenerate")
        Ginv_T = G.T.inv()
        self.ginv_t = [[Fraction(int(Ginv_T[i, j].p), int(Ginv_T[i, j].q)) for j in range(L.dim)] for i in range(L.dim)]
        self.base = CorrelatorData(pair, lattice, cutoff, kmax, lmax)
        self.view = SignedView.from_data(self.base)
        self.seeds = {}
        for g in range(lattice.rank):
            beta = tuple(1 if i == g else 0 for i in range(lattice.rank))
            if lattice.omega(beta) <= self.cutoff:
                self.seeds[beta] = self._rand()
        self.report = Report("generator")

    # -- ordering

    def betas(self) -> list:
        return [b for b in self.lattice.elements(self.cutoff) if b != self.lattice.zero]

    def slots_for(self, beta) -> list:
        slots = [(beta, k, l) for k in range(self.kmax + 1) for l in range(self.lmax + 1)]
        slots.sort(key=lambda s: (s[1] + 2 * s[2], s[1]))
        return slots + [(beta, -1, l) for l in range(self.lmax + 1)]

    def order(self) -> list:
        return [s for b in self.betas() for s in self.slots_for(b)]

    # -- tuples

    def free_tuples(self, beta, k, l):
        mu = self.lattice.mu(beta)
        L, X = self.L, self.X
        for g in cartesian(self.free_X, repeat=l):
            gs = sum(X.degrees[i] for i in g)
            for a in cartesian(self.free_L, repeat=k):
                od = out_degree([L.degrees[i] for i in a], [gs], mu, k, l)
                if 0 <= od <= self.n:
                    yield a, g, od

    def prefill(self, beta, k, l) -> dict:
        """Values forced by the unit, fundamental class and divisor laws."""
        if l == 0:
            return {}
        out = {}
        for (a, g), vec in self.view.get((beta, k, l - 1)).items():
            for z in self.Z:
                per = self.pair.basis_period(beta, z)
                if per:
                    for p in range(l):
                        out[(a, g[:p] + (z,) + g[p:])] = {o: c * per for o, c in vec.items()}
        return out

    def prefill_minus1(self, beta, l) -> dict:
        if l == 0:
            return {}
        out = {}
        for g, v in self.view.minus1.get((beta, l - 1), {}).items():
            for z in self.Z:
                per = self.pair.basis_period(beta, z)
                if per:
                    for p in range(l):
                        out[g[:p] + (z,) + g[p:]] = v * per
        return out

    # -- randomness and parameters

    def _rand(self):
        r = self.opts.noise_range
        while True:
            v = self.rng.randint(-r, r)
            if v:
                return Fraction(v)

    def _maybe(self):
        return self.rng.random() < self.opts.density

    def _choose(self, _):
        return self._rand() if self._maybe() else 0

    def _param(self) -> Affine:
        self.params.append(len(self.params))
        return Affine.param(self.params[-1])

    def _require(self, value, name, witness):
        """Record value == 0 as an equation on the current parameters."""
        if not value:
            return
        if isinstance(value, Affine) and value.coeffs:
            self.system.add(value, witness)
        else:
            self.report.record(name, False, witness)

    def _non_top_basis(self, degree):
        """Basis elements of the given degree carrying no integral."""
        L = self.L
        return [i for i in range(L.dim) if L.degrees[i] == degree and i != L.unit and not L.integral.get(i)]

    def composable(self, beta) -> bool:
        """True when beta is a summand of a larger class inside the truncation."""
        return self.lattice.omega(beta) + min(self.lattice.energies) <= self.cutoff

    def _seed_value(self, beta, v):
        """Exponential contraction seed c/k! * iota(a_1)...iota(a_k) on a harmonic tuple."""
        L = self.L
        c = self.seeds.get(beta)
        if not c:
            return {}
        gen = beta.index(1)
        iota = (self.opts.contractions or [None] * self.lattice.rank)[gen]
        if not v:
            return {L.unit: c}
        if iota is None:
            return {}
        acc = {L.unit: c / factorial(len(v))}
        for i in v:
            acc = L.mul(acc, iota.get(i, {}))
            if not acc:
                return {}
        return acc

    def _harmonic_outputs(self, beta):
        L = self.L
        out = {}
        for i in range(L.dim):
            if L.apply_p({i: 1}) == {i: Fraction(1)} and not L.integral.get(i):
                out.setdefault(L.degrees[i], []).append(i)
        return out

    # -- one slot

    def solve_slot(self, slot):
        beta, k, l = slot
        L = self.L
        space = SlotSpace(self, beta, k, l)
        pre = self.prefill(beta, k, l)
        self.view.set_slot(slot, pre)
        O = slot_residual(self.view, slot)
        free_L, free_X = set(self.free_L), set(self.free_X)

        def is_free(a, g):
            return all(i in free_L for i in a) and all(i in free_X for i in g)

        for (a, g), vec in O.items():
            if not is_free(a, g):
                for o, c in vec.items():
                    self._require(c, "relation holds on constrained tuples", {"slot": slot, "a": a, "g": g})
        Of = {space.join(a, g): v for (a, g), v in O.items() if is_free(a, g)}
        tuples = [(space.join(a, g), od) for a, g, od in self.free_tuples(beta, k, l)]
        self._check_closed(space, Of, slot)
        for v, vec in Of.items():
            self._require(L.integrate(vec), "obstruction integrates to zero", {"slot": slot, "tuple": v})
        for v, _ in tuples:
            acc = {}
            for v2, c in space.P_V(v).items():
                _add_into(acc, Of.get(v2, {}), c)
            for o, c in L.apply_p(acc).items():
                self._require(c, "harmonic obstruction vanishes", {"slot": slot, "tuple": v})
        x = {}
        for v, od in tuples:
            val = {i: -c for i, c in L.apply_h(Of.get(v, {})).items()}
            acc = {}
            for v2, c in space.h_V(v).items():
                _add_into(acc, Of.get(v2, {}), c)
            _add_into(val, L.apply_p(acc), -1)
            if val:
                x[v] = val
        if self.composable(beta):
            if l == 0 and self.opts.harmonic_noise:
                self._add_harmonic(space, tuples, x, lambda v, od: self._seed_value(beta, v))
        else:
            if self.opts.exact_noise:
                self._add_exact_noise(space, tuples, x)
            if self.opts.harmonic_noise:
                outs = self._harmonic_outputs(beta)
                self._add_harmonic(space, tuples, x, lambda v, od: {o: self._param() for o in outs.get(od, ())})
        entries = dict(pre)
        for v, vec in x.items():
            a, g = space.split(v)
            entries[(a, g)] = vec
        entries = symmetrize_interior(entries, self.X.degrees)
        if self.opts.cyclic:
            entries = cyclic_average(entries, k, L.degrees, self._pair_row, self._from_row)
        self.view.set_slot(slot, entries)

    def _check_closed(self, space, Of, slot):
        """D(O) = 0: a consequence of the relations at smaller slots, checked rather than assumed."""
        L = self.L
        chk = self.report.check("obstruction is closed")
        for v in cartesian(*[f.indices for f in space.factors()]):
            acc = L.apply_d(Of.get(v, {}))
            for v2, c in space.d_V(v).items():
                _add_into(acc, Of.get(v2, {}), -c)
            for o, c in acc.items():
                if isinstance(c, Affine):
                    c = self.system.reduce(c)
                chk.record(not c, {"slot": slot, "tuple": v})
            if not acc:
                chk.record(True)

    def _pair_row(self, vec):
        L = self.L
        row = {}
        for o, c in vec.items():
            for b in range(L.dim):
                p = L.pair_basis(o, b)
                if p:
                    row[b] = row.get(b, 0) + c * p
        return {b: c for b, c in row.items() if c}

    def _from_row(self, row):
        out = {}
        for o in range(self.L.dim):
            s = Fraction(0)
            for b, c in row.items():
                g = self.ginv_t[o][b]
                if g:
                    s = s + c * g
            if s:
                out[o] = s
        return out

    def _add_exact_noise(self, space, tuples, x):
        """Add D(y) = d y - y d_V for a random y of one lower degree without top-degree outputs."""
        L = self.L
        y = {}
        for v, od in tuples:
            if od - 1 < 0 or not self._maybe():
                continue
            choices = self._non_top_basis(od - 1)
            if choices:
                y[v] = {self.rng.choice(choices): self._rand()}
        if not y:
            return
        for v, od in tuples:
            acc = L.apply_d(y.get(v, {}))
            for v2, c in space.d_V(v).items():
                _add_into(acc, y.get(v2, {}), -c)
            if acc:
                cur = x.setdefault(v, {})
                _add_into(cur, acc, 1)
                if not cur:
                    del x[v]

    def _add_harmonic(self, space, tuples, x, values):
        """Add phi o P_V, with phi given on harmonic tuples by values(tuple, out_degree)."""
        phi = {}
        for v, od in tuples:
            if space.P_V(v) == {v: Fraction(1)}:
                val = values(v, od)
                if val:
                    phi[v] = val
        if not phi:
            return
        for v, od in tuples:
            acc = {}
            for v2, c in space.P_V(v).items():
                _add_into(acc, phi.get(v2, {}), c)
            if acc:
                cur = x.setdefault(v, {})
                _add_into(cur, acc, 1)
                if not cur:
                    del x[v]

    def solve_minus1(self, beta, l):
        X = self.X
        space = SlotSpace(self, beta, 0, l)
        pre = self.prefill_minus1(beta, l)
        self.view.minus1[(beta, l)] = pre
        O = minus1_residual(self.view, beta, l)
        free_X = set(self.free_X)
        for g, v in O.items():
            if not all(i in free_X for i in g):
                self._require(v, "scalar relation holds on constrained tuples", {"beta": beta, "l": l, "g": g})
        Of = {g: v for g, v in O.items() if all(i in free_X for i in g)}
        mu = self.lattice.mu(beta)

        def of_degree(total):
            return [g for g in cartesian(self.free_X, repeat=l) if sum(X.degrees[i] for i in g) - mu - 2 * l + 3 == total]

        for g in cartesian(self.free_X, repeat=l):
            acc = sum((c * Of.get(g2, 0) for g2, c in space.P_V(g).items()), Fraction(0))
            self._require(acc, "harmonic scalar obstruction vanishes", {"beta": beta, "l": l, "tuple": g})
        tuples = of_degree(self.n)
        x = {}
        for g in tuples:
            acc = sum((c * Of.get(g2, 0) for g2, c in space.h_V(g).items()), Fraction(0))
            if acc:
                x[g] = -acc
        if self.opts.exact_noise:
            y = {g: self._rand() for g in of_degree(self.n - 1) if self._maybe()}
            for g in tuples:
                acc = sum((c * y.get(g2, 0) for g2, c in space.d_V(g).items()), Fraction(0))
                if acc:
                    x[g] = x.get(g, 0) + acc
        if self.opts.harmonic_noise:
            phi = {g: self._param() for g in tuples if space.P_V(g) == {g: Fraction(1)}}
            for g in tuples:
                acc = sum((c * phi.get(g2, 0) for g2, c in space.P_V(g).items()), Fraction(0))
                if acc:
                    x[g] = x.get(g, 0) + acc
        entries = dict(pre)
        entries.update({g: v for g, v in x.items() if v})
        self.view.minus1[(beta, l)] = symmetrize_scalar(entries, X.degrees)

    def _substitute(self, beta, values):
        for slot in list(self.view.slots):
            if slot[0] == beta:
                entries = {}
                for key, vec in self.view.slots[slot].items():
                    v = {o: substitute(c, values) for o, c in vec.items()}
                    v = {o: c for o, c in v.items() if c}
                    if v:
                        entries[key] = v
                self.view.set_slot(slot, entries)
        for key in list(self.view.minus1):
            if key[0] == beta:
                table = {g: substitute(v, values) for g, v in self.view.minus1[key].items()}
                self.view.minus1[key] = {g: v for g, v in table.items() if v}

    def solve_beta(self, beta):
        self.system = LinearSystem()
        self.params = []
        for slot in self.slots_for(beta):
            if slot[1] == -1:
                self.solve_minus1(beta, slot[2])
            else:
                self.solve_slot(slot)
        consistent = self.system.ok
        self.report.record("obstruction equations are solvable", consistent,
                           {"beta": beta, "witnesses": self.system.inconsistent[:3]})
        values = self.system.solve(self.params, self._choose)
        self._substitute(beta, values)
        self.report.note(f"beta {list(beta)}: {len(self.params)} harmonic parameters, "
                         f"{len(self.system.pivots)} fixed by obstruction equations")

    def run(self) -> GenerationResult:
        for beta in self.betas():
            self.solve_beta(beta)
        data = self.to_data()
        full = Report("generated data")
        full.merge(self.report, "solve: ")
        full.merge(check_q_relations(data), "")
        full.merge(check_q_minus1_relations(data), "")
        full.merge(check_axioms_on_data(data), "axiom: ")
        prov = {"generator": "homotopy-transfer", "seed": self.opts.seed,
                "order": [[list(b), k, l] for b, k, l in self.order()],
                "seeds": {str(list(b)): format_fraction(c) for b, c in self.seeds.items()},
                "options": {"exact_noise": self.opts.exact_noise, "harmonic_noise": self.opts.harmonic_noise,
                            "cyclic": self.opts.cyclic, "noise_range": self.opts.noise_range,
                            "density": format_fraction(Fraction(self.opts.density).limit_denominator(1000)),
                            "contractions": self._named_contractions()}}
        return GenerationResult(data, full, self.order(), prov)

    def _named_contractions(self):
        names = self.L.names
        out = []
        for iota in self.opts.contractions or []:
            if iota is None:
                out.append(None)
                continue
            out.append({names[i]: {names[j]: format_fraction(Fraction(c)) for j, c in sorted(v.items())}
                        for i, v in sorted(iota.items())})
        return out

    def to_data(self) -> CorrelatorData:
        L, X, n = self.L, self.X, self.n
        b0 = self.lattice.zero
        disk = {}
        for slot, entries in self.view.slots.items():
            beta, k, l = slot
            if beta == b0:
                continue
            raw = {}
            for (a, g), vec in entries.items():
                e = epsilon([L.degrees[i] for i in a], [X.degrees[i] for i in g], n)
                raw[(a, g)] = {o: (-c if e else c) for o, c in vec.items()}
            if raw:
                disk[slot] = raw
        for (beta, l), table in self.view.minus1.items():
            raw = {}
            for g, v in table.items():
                e = epsilon((), [X.degrees[i] for i in g], n, k=-1)
                raw[((), g)] = -v if e else v
            if raw:
                disk[(beta, -1, l)] = raw
        return CorrelatorData(self.pair, self.lattice, self.cutoff, self.kmax, self.lmax, disk)


def symmetrize_interior(entries: dict, xdeg) -> dict:
    out = {}
    for (a, g), vec in entries.items():
        l = len(g)
        if l < 2:
            _add_into(out.setdefault((a, g), {}), vec, 1)
            continue
        gd = [xdeg[i] for i in g]
        w = Fraction(1, factorial(l))
        for perm in permutations(range(l)):
            g2 = tuple(g[p] for p in perm)
            s = _perm_parity(perm, gd)
            _add_into(out.setdefault((a, g2), {}), vec, -w if s else w)
    return {k: v for k, v in out.items() if v}


def symmetrize_scalar(entries: dict, xdeg) -> dict:
    out = {}
    for g, v in entries.items():
        l = len(g)
        gd = [xdeg[i] for i in g]
        w = Fraction(1, factorial(l))
        for perm in permutations(range(l)):
            g2 = tuple(g[p] for p in perm)
            s = _perm_parity(perm, gd)
            out[g2] = out.get(g2, 0) + (-w if s else w) * v
    return {g: v for g, v in out.items() if v}


def cyclic_average(entries: dict, k: int, ldeg, pair_row, from_row) -> dict:
    """Average <q(a_1..a_k), a_{k+1}> over cyclic rotations with the cyclic sign."""
    if k == 0:
        return dict(entries)
    forms = {}
    for (a, g), vec in entries.items():
        for b, c in pair_row(vec).items():
            forms[(a + (b,), g)] = c

    def rot_sign(t):
        head, last = t[:-1], t[-1]
        return (ldeg[last] + 1) * sum(ldeg[x] + 1 for x in head) % 2

    avg = {}
    w = Fraction(1, k + 1)
    seen = set()
    for (t, g) in list(forms):
        orbit = [t]
        for _ in range(k):
            orbit.append(orbit[-1][1:] + orbit[-1][:1])
        for t0 in orbit:
            if (t0, g) in seen:
                continue
            seen.add((t0, g))
            total = Fraction(0)
            cur, parity = t0, 0
            for _ in range(k + 1):
                c = forms.get((cur, g))
                if c:
                    total += -c if parity else c
                parity ^= rot_sign(cur)
                cur = (cur[-1],) + cur[:-1]
            if total:
                avg[(t0, g)] = total * w
    rows = {}
    for (t, g), c in avg.items():
        rows.setdefault((t[:-1], g), {})[t[-1]] = c
    out = {}
    for key, row in rows.items():
        vec = from_row(row)
        if vec:
            out[key] = vec
    return out


def generate(pair: RelativePairModel, lattice: DegreeLattice, cutoff, kmax: int, lmax: int,
             options: GeneratorOptions | None = None) -> GenerationResult:
    return Generator(pair, lattice, cutoff, kmax, lmax, options).run()
