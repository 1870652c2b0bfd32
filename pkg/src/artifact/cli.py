"""Bundle files and the command line front end."""

import argparse
from concurrent.futures import ProcessPoolExecutor
import json
from fractions import Fraction
from itertools import product as cartesian
import sys

from .dgmodel import CDGAModel, CElement, RelativePairModel, check_model
from .generator import GeneratorOptions, generate
from .isotopy import (TDegreeOverflow, build_gamma_tilde, check_endpoints, check_interval_ainfty,
                      check_interval_cyclic_unital, check_stokes, check_uniform_relations, IsotopyStructure)
from .novikov import DegreeLattice, FormalVariableSpec, RingContext, RingElement, format_fraction, parse_fraction
from .qops import (CorrelatorData, DataError, build_m, check_axioms_on_data, check_chain_map,
                   check_cyclic_unital, check_q_minus1_relations, check_q_relations, check_thm_prop,
                   ainfty_residual)
from .report import Report
from . import signs

FORMAT = "artifact-bundle/1"
SECTIONS = ("format", "lattice", "variables", "model_L", "model_X", "relative", "periods", "correlators",
            "gamma", "gamma_prime", "eta", "truncation", "sign_flags", "provenance", "isotopy")


class BundleError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _reject_float(text):
    raise ValueError(f"floating point literal {text} is not allowed; write rationals as \"p/q\" strings")


def load_json(text: str):
    def pairs(items):
        out = {}
        for k, v in items:
            if k in out:
                raise ValueError(f"duplicate key {k!r}")
            out[k] = v
        return out
    return json.loads(text, parse_float=_reject_float, parse_constant=_reject_float, object_pairs_hook=pairs)


# -- parsing helpers


def _rational(value, where: str) -> Fraction:
    if not isinstance(value, str):
        raise BundleError([f"{where}: rationals must be \"p/q\" strings, got {value!r}"])
    try:
        return parse_fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise BundleError([f"{where}: {exc}"]) from None


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BundleError([f"{where}: expected an integer, got {value!r}"])
    return value


def _obj(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise BundleError([f"{where}: expected an object"])
    return value


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise BundleError([f"{where}: expected a list"])
    return value


def _index(model: CDGAModel, name, where: str) -> int:
    if not isinstance(name, str) or name not in model.index:
        raise BundleError([f"{where}: unknown basis element {name!r}"])
    return model.index[name]


def _vec(model: CDGAModel, obj, where: str) -> dict:
    obj = _obj(obj, where)
    return {_index(model, k, where): _rational(v, f"{where}.{k}") for k, v in obj.items()}


def _parse_model(obj, where: str) -> CDGAModel:
    obj = _obj(obj, where)
    basis = []
    seen = set()
    for j, entry in enumerate(_list(obj.get("basis"), f"{where}.basis")):
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)):
            raise BundleError([f"{where}.basis[{j}]: expected [name, degree]"])
        if entry[0] in seen:
            raise BundleError([f"{where}.basis[{j}]: duplicate basis name {entry[0]!r}"])
        seen.add(entry[0])
        basis.append((entry[0], _int(entry[1], f"{where}.basis[{j}]")))
    names = {b[0]: i for i, b in enumerate(basis)}

    def idx(name, w):
        if name not in names:
            raise BundleError([f"{w}: unknown basis element {name!r}"])
        return names[name]

    def vec(o, w):
        return {idx(k, w): _rational(v, f"{w}.{k}") for k, v in _obj(o, w).items()}

    n = _int(obj.get("n"), f"{where}.n")
    unit = idx(obj.get("unit"), f"{where}.unit")
    d = {idx(k, f"{where}.d"): vec(v, f"{where}.d.{k}") for k, v in _obj(obj.get("d", {}), f"{where}.d").items()}
    prod = {}
    for j, entry in enumerate(_list(obj.get("product", []), f"{where}.product")):
        w = f"{where}.product[{j}]"
        if not (isinstance(entry, list) and len(entry) == 3):
            raise BundleError([f"{w}: expected [left, right, value]"])
        key = (idx(entry[0], w), idx(entry[1], w))
        if key in prod:
            raise BundleError([f"{w}: duplicate product entry"])
        prod[key] = vec(entry[2], w)
    integral = {idx(k, f"{where}.integral"): _rational(v, f"{where}.integral.{k}")
                for k, v in _obj(obj.get("integral", {}), f"{where}.integral").items()}
    homotopy = None
    if "homotopy" in obj:
        homotopy = {idx(k, f"{where}.homotopy"): vec(v, f"{where}.homotopy.{k}")
                    for k, v in _obj(obj["homotopy"], f"{where}.homotopy").items()}
    try:
        return CDGAModel(n, basis, unit, differential=d, product=prod, integral=integral, homotopy=homotopy)
    except ValueError as exc:
        raise BundleError([f"{where}: {exc}"]) from None


def _emit_vec(model: CDGAModel, vec: dict) -> dict:
    return {model.names[i]: format_fraction(Fraction(c)) for i, c in sorted(vec.items()) if c}


def _emit_model(m: CDGAModel) -> dict:
    out = {
        "n": m.n,
        "basis": [[nm, dg] for nm, dg in zip(m.names, m.degrees)],
        "unit": m.names[m.unit],
        "d": {m.names[i]: _emit_vec(m, v) for i, v in sorted(m.d.items()) if v},
        "product": [[m.names[i], m.names[j], _emit_vec(m, v)] for (i, j), v in sorted(m.mult.items())
                    if i != m.unit and j != m.unit and i <= j and v],
        "integral": {m.names[i]: format_fraction(c) for i, c in sorted(m.integral.items())},
    }
    if m._given_h is not None:
        out["homotopy"] = {m.names[i]: _emit_vec(m, v) for i, v in sorted(m._given_h.items()) if v}
    return out


class Bundle:
    """One complete instance: models, lattice, correlators, bulk elements and settings."""

    def __init__(self, pair, lattice, ctx, data, variables, gamma=None, gamma_prime=None, eta=None,
                 provenance=None, t_degree_cap=12, has_x=True):
        self.pair = pair
        self.lattice = lattice
        self.ctx = ctx
        self.data = data
        self.variables = variables
        self.gamma = gamma
        self.gamma_prime = gamma_prime
        self.eta = eta
        self.provenance = provenance or {}
        self.t_degree_cap = t_degree_cap
        self.has_x = has_x

    @property
    def L(self):
        return self.pair.l

    @property
    def X(self):
        return self.pair.x

    def with_data(self, data: CorrelatorData) -> "Bundle":
        ctx = self.ctx
        if data.cutoff != ctx.cutoff:
            ctx = RingContext(self.lattice, ctx.variables, data.cutoff)
        conv = (lambda x: None if x is None else CElement(x.model, ctx, {
            i: RingElement.from_records(ctx, c.to_records()) for i, c in x.coeffs.items()}))
        return Bundle(self.pair, self.lattice, ctx, data, self.variables, conv(self.gamma),
                      conv(self.gamma_prime), conv(self.eta), self.provenance, self.t_degree_cap, self.has_x)

    def __eq__(self, other):
        if not isinstance(other, Bundle):
            return NotImplemented
        return emit_bundle(self) == emit_bundle(other)


def _variable_section(obj) -> list:
    out = []
    seen = set()
    for j, v in enumerate(_list(obj, "variables")):
        w = f"variables[{j}]"
        v = _obj(v, w)
        name = v.get("name")
        if not isinstance(name, str):
            raise BundleError([f"{w}.name: expected a string"])
        if name in seen:
            raise BundleError([f"{w}: duplicate variable name {name!r}"])
        seen.add(name)
        role = v.get("role")
        if role not in (None, "fundamental", "divisor"):
            raise BundleError([f"{w}.role: must be fundamental, divisor or null"])
        out.append({"name": name, "degree": _int(v.get("degree", 0), f"{w}.degree"), "role": role,
                    "divisor": v.get("divisor")})
    return out


def _ring(ctx: RingContext, records, where: str) -> RingElement:
    out = ctx.zero()
    for j, rec in enumerate(_list(records, where)):
        w = f"{where}[{j}]"
        rec = _obj(rec, w)
        beta = [_int(b, f"{w}.beta") for b in _list(rec.get("beta"), f"{w}.beta")]
        t = [_int(b, f"{w}.t") for b in _list(rec.get("t", [0] * ctx.variables.count), f"{w}.t")]
        if len(beta) != ctx.lattice.rank or len(t) != ctx.variables.count:
            raise BundleError([f"{w}: exponent vectors have the wrong length"])
        if any(b < 0 for b in beta) or any(b < 0 for b in t):
            raise BundleError([f"{w}: exponents must be nonnegative"])
        out = out + ctx.monomial(beta, t, _rational(rec.get("coeff"), f"{w}.coeff"))
    return out


def _celement(X: CDGAModel, ctx: RingContext, obj, where: str) -> CElement:
    obj = _obj(obj, where)
    return CElement(X, ctx, {_index(X, k, where): _ring(ctx, v, f"{where}.{k}") for k, v in obj.items()})


def _emit_celement(x: CElement) -> dict:
    return {x.model.names[i]: c.to_records() for i, c in sorted(x.coeffs.items())}


def bundle_from_dict(doc) -> Bundle:
    doc = _obj(doc, "bundle")
    unknown = sorted(set(doc) - set(SECTIONS))
    if unknown:
        raise BundleError([f"unknown section {s!r}" for s in unknown])
    if doc.get("format", FORMAT) != FORMAT:
        raise BundleError([f"format: expected {FORMAT!r}"])
    for req in ("lattice", "model_L", "truncation"):
        if req not in doc:
            raise BundleError([f"missing section {req!r}"])
    gens = _list(_obj(doc["lattice"], "lattice").get("generators"), "lattice.generators")
    pairs = []
    for j, g in enumerate(gens):
        g = _obj(g, f"lattice.generators[{j}]")
        pairs.append((_rational(g.get("omega"), f"lattice.generators[{j}].omega"),
                      _int(g.get("mu"), f"lattice.generators[{j}].mu")))
    try:
        lattice = DegreeLattice.from_pairs(pairs)
    except ValueError as exc:
        raise BundleError([f"lattice: {exc}"]) from None
    variables = _variable_section(doc.get("variables", []))
    tr = _obj(doc["truncation"], "truncation")
    cutoff = _rational(tr.get("E"), "truncation.E")
    kmax = _int(tr.get("K_max"), "truncation.K_max")
    lmax = _int(tr.get("L_max"), "truncation.L_max")
    try:
        ctx = RingContext(lattice, FormalVariableSpec(tuple(v["degree"] for v in variables)), cutoff)
    except ValueError as exc:
        raise BundleError([f"variables: {exc}"]) from None
    L = _parse_model(doc["model_L"], "model_L")
    has_x = "model_X" in doc
    X = _parse_model(doc["model_X"], "model_X") if has_x else L
    rel = _obj(doc.get("relative", {}), "relative")
    if has_x:
        relative = [_index(X, nm, "relative.basis") for nm in _list(rel.get("basis", []), "relative.basis")]
        restriction = {_index(X, k, "relative.restriction"): _vec(L, v, f"relative.restriction.{k}")
                       for k, v in _obj(rel.get("restriction", {}), "relative.restriction").items()}
    else:
        if rel:
            raise BundleError(["relative: requires model_X"])
        relative = []
        restriction = {i: {i: Fraction(1)} for i in range(L.dim)}
    if len(set(relative)) != len(relative):
        raise BundleError(["relative.basis: duplicate entries"])
    periods = [_vec(X, p, f"periods[{j}]") for j, p in enumerate(_list(doc.get("periods", []), "periods"))]
    if len(periods) != lattice.rank:
        raise BundleError([f"periods: expected one entry per lattice generator ({lattice.rank})"])
    pair = RelativePairModel(X, L, restriction, relative, periods)
    disk, sphere = {}, {}
    corr = _obj(doc.get("correlators", {}), "correlators")
    for j, blk in enumerate(_list(corr.get("disk", []), "correlators.disk")):
        w = f"correlators.disk[{j}]"
        blk = _obj(blk, w)
        beta = tuple(_int(b, f"{w}.beta") for b in _list(blk.get("beta"), f"{w}.beta"))
        k, l = _int(blk.get("k"), f"{w}.k"), _int(blk.get("l"), f"{w}.l")
        slot = (beta, k, l)
        if slot in disk:
            raise BundleError([f"{w}: duplicate slot {slot}"])
        entries = {}
        for e, ent in enumerate(_list(blk.get("entries", []), f"{w}.entries")):
            we = f"{w}.entries[{e}]"
            ent = _obj(ent, we)
            a = tuple(_index(L, nm, f"{we}.alpha") for nm in _list(ent.get("alpha", []), f"{we}.alpha"))
            g = tuple(_index(X, nm, f"{we}.gamma") for nm in _list(ent.get("gamma", []), f"{we}.gamma"))
            if (a, g) in entries:
                raise BundleError([f"{we}: duplicate key"])
            if k == -1:
                entries[(a, g)] = _rational(ent.get("value"), f"{we}.value")
            else:
                entries[(a, g)] = _vec(L, ent.get("value"), f"{we}.value")
        disk[slot] = entries
    for j, blk in enumerate(_list(corr.get("sphere", []), "correlators.sphere")):
        w = f"correlators.sphere[{j}]"
        blk = _obj(blk, w)
        beta = tuple(_int(b, f"{w}.beta") for b in _list(blk.get("beta"), f"{w}.beta"))
        l = _int(blk.get("l"), f"{w}.l")
        if (beta, l) in sphere:
            raise BundleError([f"{w}: duplicate slot"])
        entries = {}
        for e, ent in enumerate(_list(blk.get("entries", []), f"{w}.entries")):
            we = f"{w}.entries[{e}]"
            ent = _obj(ent, we)
            g = tuple(_index(X, nm, f"{we}.gamma") for nm in _list(ent.get("gamma", []), f"{we}.gamma"))
            if g in entries:
                raise BundleError([f"{we}: duplicate key"])
            entries[g] = _vec(X, ent.get("value"), f"{we}.value")
        sphere[(beta, l)] = entries
    flags = _obj(doc.get("sign_flags", {}), "sign_flags")
    gw = _int(flags.get("q_minus1_gw", 1), "sign_flags.q_minus1_gw")
    if gw not in (1, -1):
        raise BundleError(["sign_flags.q_minus1_gw: must be +1 or -1"])
    try:
        data = CorrelatorData(pair, lattice, cutoff, kmax, lmax, disk, sphere, gw)
    except (DataError, ValueError) as exc:
        raise BundleError([f"correlators: {exc}"]) from None
    bulk = {}
    for sec in ("gamma", "gamma_prime", "eta"):
        if sec in doc:
            bulk[sec] = _celement(X, ctx, doc[sec], sec)
    for j, v in enumerate(variables):
        if v["divisor"] is not None:
            v["divisor"] = _vec(X, v["divisor"], f"variables[{j}].divisor")
    iso = _obj(doc.get("isotopy", {}), "isotopy")
    cap = _int(iso.get("t_degree_cap", 12), "isotopy.t_degree_cap")
    prov = _obj(doc.get("provenance", {}), "provenance")
    return Bundle(pair, lattice, ctx, data, variables, bulk.get("gamma"), bulk.get("gamma_prime"),
                  bulk.get("eta"), prov, cap, has_x)


def parse_bundle(source) -> Bundle:
    """Parse a bundle from a path or an already loaded document."""
    if isinstance(source, dict):
        return bundle_from_dict(source)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise BundleError([f"{source}: {exc.strerror}"]) from None
    return parse_bundle_text(text)


def parse_bundle_text(text: str) -> Bundle:
    try:
        doc = load_json(text)
    except ValueError as exc:
        raise BundleError([f"syntax: {exc}"]) from None
    return bundle_from_dict(doc)


def emit_bundle(b: Bundle) -> dict:
    L, X = b.L, b.X
    data = b.data
    disk = []
    for (beta, k, l), entries in sorted(data.disk.items()):
        ents = []
        for (a, g), v in sorted(entries.items()):
            val = format_fraction(v) if k == -1 else _emit_vec(L, v)
            ents.append({"alpha": [L.names[i] for i in a], "gamma": [X.names[i] for i in g], "value": val})
        disk.append({"beta": list(beta), "k": k, "l": l, "entries": ents})
    sphere = []
    for (beta, l), entries in sorted(data.sphere.items()):
        ents = [{"gamma": [X.names[i] for i in g], "value": _emit_vec(X, v)} for g, v in sorted(entries.items())]
        sphere.append({"beta": list(beta), "l": l, "entries": ents})
    variables = []
    for v in b.variables:
        variables.append({"name": v["name"], "degree": v["degree"], "role": v["role"],
                          "divisor": None if v["divisor"] is None else _emit_vec(X, v["divisor"])})
    doc = {
        "format": FORMAT,
        "lattice": {"generators": [{"omega": format_fraction(w), "mu": m}
                                   for w, m in zip(b.lattice.energies, b.lattice.maslov)]},
        "variables": variables,
        "model_L": _emit_model(L),
    }
    if b.has_x:
        doc["model_X"] = _emit_model(X)
        doc["relative"] = {"basis": [X.names[i] for i in b.pair.relative],
                           "restriction": {X.names[i]: _emit_vec(L, v) for i, v in sorted(b.pair.r.items()) if v}}
    doc["periods"] = [_emit_vec(X, p) for p in b.pair.periods]
    doc["correlators"] = {"disk": disk, "sphere": sphere}
    for sec, val in (("gamma", b.gamma), ("gamma_prime", b.gamma_prime), ("eta", b.eta)):
        if val is not None:
            doc[sec] = _emit_celement(val)
    doc["truncation"] = {"E": format_fraction(data.cutoff), "K_max": data.kmax, "L_max": data.lmax}
    doc["sign_flags"] = {"q_minus1_gw": data.gw_sign}
    doc["provenance"] = b.provenance
    doc["isotopy"] = {"t_degree_cap": b.t_degree_cap}
    return doc


def emit_bundle_text(b: Bundle) -> str:
    return json.dumps(emit_bundle(b), indent=1, sort_keys=False) + "\n"


# -- option handling


def apply_overrides(b: Bundle, args) -> Bundle:
    data = b.data
    cutoff = data.cutoff if args.truncation_E is None else _rational(args.truncation_E, "--truncation-E")
    kmax = data.kmax if args.kmax is None else args.kmax
    gw = data.gw_sign if args.flag_gw_sign is None else args.flag_gw_sign
    if (cutoff, kmax, gw) == (data.cutoff, data.kmax, data.gw_sign):
        return b
    keep = lambda beta: b.lattice.omega(beta) <= cutoff
    disk = {s: e for s, e in data.disk.items() if keep(s[0]) and s[1] <= kmax}
    sphere = {s: e for s, e in data.sphere.items() if keep(s[0])}
    new = CorrelatorData(data.pair, data.lattice, cutoff, kmax, data.lmax, disk, sphere, gw)
    return b.with_data(new)


def _run_tasks(tasks, jobs: int) -> list:
    """Run (function, args) pairs, in parallel when jobs > 1; results keep task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [f(*a) for f, a in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(f, *a) for f, a in tasks]
        return [fu.result() for fu in futures]


def _ainfty_arity(m, k) -> Report:
    rep = Report("A-infinity relations")
    chk = rep.check("A-infinity relation")
    L = m.model
    chk.total += L.dim ** k
    for a, vec in sorted(ainfty_residual(m, k).items()):
        chk.failures.append({"k": k, "alpha": ", ".join(L.names[i] for i in a),
                             "value": {L.names[o]: repr(c) for o, c in sorted(vec.items())}})
    return rep


def _combine(title: str, parts) -> Report:
    rep = Report(title)
    for p in parts:
        rep.merge(p)
    return rep


# -- commands


def cmd_check_model(b, args):
    rep = Report("models")
    rep.merge(check_model(b.L), "L: ")
    if b.has_x:
        rep.merge(check_model(b.X), "X: ")
        rep.merge(b.pair.check(), "pair: ")
    return rep


def cmd_check_correlators(b, args):
    slots = b.data.slots()
    chunks = [slots[i::max(args.jobs, 1)] for i in range(max(args.jobs, 1))]
    tasks = [(check_q_relations, (b.data, c)) for c in chunks if c]
    rep = _combine("correlator relations", _run_tasks(tasks, args.jobs))
    rep.merge(check_q_minus1_relations(b.data))
    rep.merge(check_chain_map(b.data))
    return rep


def _gamma(b):
    if b.gamma is None:
        return CElement(b.X, b.ctx, {})
    return b.gamma


def _build(b):
    try:
        return build_m(b.data, _gamma(b)), None
    except ValueError as exc:
        rep = Report("bulk element")
        rep.record("bulk element admissible", False, str(exc))
        return None, rep


def cmd_build_m(b, args):
    m, err = _build(b)
    if err:
        return err
    rep = Report("operations")
    rep.record("bulk element admissible", True)
    L = m.model
    for k in sorted(m.ops):
        for a, vec in sorted(m.ops[k].items()):
            terms = " + ".join(f"({c})*{L.names[o]}" for o, c in sorted(vec.items()))
            rep.note(f"m_{k}({', '.join(L.names[i] for i in a)}) = {terms}")
    rep.note(f"m_-1 = {m.m_minus1}")
    return rep


def cmd_check_ainfty(b, args):
    m, err = _build(b)
    if err:
        return err
    kmax = m.kmax
    return _combine("A-infinity relations", _run_tasks([(_ainfty_arity, (m, k)) for k in range(kmax + 1)], args.jobs))


def cmd_check_axioms(b, args):
    rep = Report("axioms")
    rep.merge(check_axioms_on_data(b.data), "data: ")
    m, err = _build(b)
    if err:
        rep.merge(err)
        return rep
    rep.merge(check_cyclic_unital(m), "structure: ")
    return rep


def cmd_check_properties(b, args):
    roles = {v["role"]: (j, v) for j, v in enumerate(b.variables) if v["role"]}
    if "fundamental" not in roles or "divisor" not in roles:
        raise BundleError(["variables: check-properties needs one fundamental and one divisor variable"])
    m, err = _build(b)
    if err:
        return err
    j0, _ = roles["fundamental"]
    j1, v1 = roles["divisor"]
    try:
        return check_thm_prop(m, b.data, _gamma(b), j0, j1, v1["divisor"] or {})
    except ValueError as exc:
        rep = Report("derivative and reduction laws")
        rep.record("bulk element has the stated variable dependence", False, str(exc))
        return rep


def _isotopy(b):
    gamma = _gamma(b)
    gp = b.gamma_prime if b.gamma_prime is not None else gamma
    eta = b.eta if b.eta is not None else CElement(b.X, b.ctx, {})
    gt = build_gamma_tilde(gamma, gp, eta)
    return IsotopyStructure(b.data, gt, b.t_degree_cap)


def cmd_isotopy_build(b, args):
    rep = Report("isotopy")
    try:
        m = _isotopy(b)
        L = m.model
        rep.record("interpolating bulk element admissible", True)
        rep.note(f"bulk: {m.gamma}")
        for k in range(m.kmax + 1):
            for a in cartesian(range(L.dim), repeat=k):
                val = m.core(a)
                if val:
                    terms = " + ".join(f"({c})*{'dt ' if e else ''}{f't^{p} ' if p else ''}{L.names[o]}"
                                       for (e, p, o), c in sorted(val.items()))
                    rep.note(f"m~_{k}({', '.join(L.names[i] for i in a)}) = {terms}")
        rep.note(f"m~_-1 = {m.m_minus1}")
    except TDegreeOverflow as exc:
        rep.record("t-degree within cap", False, str(exc))
    except ValueError as exc:
        rep.record("interpolating bulk element admissible", False, str(exc))
    return rep


def cmd_isotopy_check(b, args):
    try:
        m = _isotopy(b)
    except (TDegreeOverflow, ValueError) as exc:
        rep = Report("pseudo-isotopy")
        rep.record("interpolating bulk element admissible", False, str(exc))
        return rep
    kmax = min(3, m.kmax)
    seed = args.seed or 0
    tasks = [(check_interval_ainfty, (m, kmax, 1, args.limit, seed)),
             (check_interval_cyclic_unital, (m, 1, args.limit, seed)),
             (check_endpoints, (m,)),
             (check_uniform_relations, (m, kmax, 1, args.limit, seed)),
             (check_stokes, (m.model, m.ctx, 3))]
    try:
        return _combine("pseudo-isotopy", _run_tasks(tasks, args.jobs))
    except TDegreeOverflow as exc:
        rep = Report("pseudo-isotopy")
        rep.record("t-degree within cap", False, str(exc))
        return rep


def _generator_options(b: Bundle, args) -> GeneratorOptions:
    opts = dict(_obj(b.provenance.get("options", {}), "provenance.options"))
    kw = {}
    for key in ("exact_noise", "harmonic_noise", "cyclic"):
        if key in opts:
            if not isinstance(opts[key], bool):
                raise BundleError([f"provenance.options.{key}: expected true or false"])
            kw[key] = opts[key]
    if "noise_range" in opts:
        kw["noise_range"] = _int(opts["noise_range"], "provenance.options.noise_range")
    if "density" in opts:
        kw["density"] = float(_rational(opts["density"], "provenance.options.density"))
    if opts.get("contractions") is not None:
        conts = []
        for j, c in enumerate(_list(opts["contractions"], "provenance.options.contractions")):
            w = f"provenance.options.contractions[{j}]"
            conts.append(None if c is None else {_index(b.L, k, w): _vec(b.L, v, f"{w}.{k}")
                                                 for k, v in _obj(c, w).items()})
        kw["contractions"] = conts
    seed = args.seed if args.seed is not None else b.provenance.get("seed", 0)
    kw["seed"] = _int(seed, "seed")
    return GeneratorOptions(**kw)


def cmd_generate(b, args):
    opts = _generator_options(b, args)
    data = b.data
    res = generate(b.pair, b.lattice, data.cutoff, data.kmax, data.lmax, opts)
    out = b.with_data(res.data.replace(gw_sign=data.gw_sign))
    out.provenance = res.provenance
    text = emit_bundle_text(out)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return res.report


def _sign_spec(spec: str) -> dict:
    out = {}
    for part in (spec or "").split(","):
        if not part.strip():
            continue
        key, _, val = part.partition("=")
        try:
            out[key.strip()] = int(val)
        except ValueError:
            raise BundleError([f"sign table spec {spec!r}: expected name=integer pairs"]) from None
    return out


def cmd_dump_signs(b, args):
    rep = Report("sign tables")
    n_default = b.L.n if b is not None else 1
    if args.epsilon is not None:
        s = _sign_spec(args.epsilon)
        k, l, n = s.get("k", 0), s.get("l", 0), s.get("n", n_default)
        dmax = s.get("dmax", n)
        for ad in cartesian(range(dmax + 1), repeat=k):
            for gd in cartesian(range(dmax + 1), repeat=l):
                e = signs.epsilon(ad, gd, n)
                rep.note(f"epsilon k={k} l={l} n={n} alpha={list(ad)} gamma={list(gd)} parity={int(e)} sign={e.sign:+d}")
    if args.cyclic is not None:
        s = _sign_spec(args.cyclic)
        k, dmax = s.get("k", 1), s.get("dmax", n_default)
        for degs in cartesian(range(dmax + 1), repeat=k + 1):
            e = signs.cyclic_sign(degs)
            rep.note(f"cyclic k={k} degrees={list(degs)} parity={int(e)} sign={e.sign:+d}")
    if args.delta is not None:
        s = _sign_spec(args.delta)
        k, n = s.get("k", 2), s.get("n", n_default)
        for k1 in range(1, k + 2):
            k2 = k + 1 - k1
            for i in range(1, k1 + 1):
                e = signs.delta_glue(k1, k2, i, n)
                rep.note(f"delta k1={k1} k2={k2} i={i} n={n} parity={int(e)} sign={e.sign:+d}")
    return rep


COMMANDS = {
    "check-model": cmd_check_model,
    "check-correlators": cmd_check_correlators,
    "build-m": cmd_build_m,
    "check-ainfty": cmd_check_ainfty,
    "check-axioms": cmd_check_axioms,
    "check-properties": cmd_check_properties,
    "isotopy-build": cmd_isotopy_build,
    "isotopy-check": cmd_isotopy_check,
    "generate": cmd_generate,
    "dump-signs": cmd_dump_signs,
}


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description="Check and generate A-infinity correlator bundles.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("bundle", nargs="?", help="bundle file (JSON)")
    p.add_argument("--truncation-E", dest="truncation_E", help="lower the energy cutoff (rational)")
    p.add_argument("--kmax", type=int, help="lower the boundary arity cap")
    p.add_argument("--seed", type=int, help="generator seed; also seeds sampled checks")
    p.add_argument("--flag-gw-sign", dest="flag_gw_sign", type=int, choices=(1, -1),
                   help="override the recorded sign of the sphere term")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent checks")
    p.add_argument("--limit", type=int, default=4000, help="tuple budget per arity for interval checks")
    p.add_argument("--output", "-o", help="where generate writes the bundle (default stdout)")
    p.add_argument("--epsilon", help="dump-signs: epsilon table, e.g. k=2,l=1,n=1")
    p.add_argument("--cyclic", help="dump-signs: cyclic rotation table, e.g. k=2")
    p.add_argument("--delta", help="dump-signs: gluing sign table, e.g. k=3,n=1")
    return p


def run(command: str, bundle, args) -> tuple:
    """Returns (report, exit status)."""
    rep = COMMANDS[command](bundle, args)
    return rep, (1 if rep.nonzero else 0)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    out = sys.stderr if args.command == "generate" and not args.output else sys.stdout
    try:
        bundle = None
        if args.bundle is not None:
            bundle = apply_overrides(parse_bundle(args.bundle), args)
        elif args.command != "dump-signs":
            raise BundleError([f"{args.command} requires a bundle file"])
        if args.command == "dump-signs" and not (args.epsilon or args.cyclic or args.delta):
            args.epsilon = "k=2"
        rep, status = run(args.command, bundle, args)
    except BundleError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
        return 2
    print(rep.render(), file=out)
    return status


if __name__ == "__main__":
    sys.exit(main())
