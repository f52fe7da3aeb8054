"""Command-line front end.

``banachgap compute --config FILE`` evaluates the tasks of a JSON document,
``banachgap reproduce NAME`` runs a named worked example and
``banachgap suite`` runs the seeded property suite.  Results are written to
standard output as one JSON object per line; a human-readable table goes
to standard error unless ``--quiet`` is given.

Exit codes: 0 success, 1 a property or enclosure check failed, 2 invalid
configuration or arguments, 3 a point budget was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .banach_mazur import bm_upper, prop61_check, prop62_embed
from .config import BudgetExceeded, Config
from .constructions import (douady_pair, estimate_642, example_310, example_314, identity_642,
                            kadets_bound, kadets_glue, mazur_maps)
from .indices import Family, build_index_set, h_index
from .norms import Lp, NormedSpace, from_dict, parse_p
from .openings import (GapReport, Method, hilbert_theta, inclination, lambda0, lambda_gap, omega,
                       omega0, theta, theta0)
from .operator_opening import prop53_check, r0_bounds, r_bounds
from .operators import LinearMap, min_modulus, regular_type_demo
from .polyhedral import PolyhedralTooLarge
from .subspaces import Subspace
from .suite import PROPERTIES, _num, run_property

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

QUANTITIES = ("theta", "theta0", "omega", "omega0", "lambda", "lambda0", "r", "r0", "dg", "dop",
              "inclination", "bm", "gamma", "h-index")

REPRODUCTIONS = ("example-3.10", "example-3.14", "douady-5.9", "kadets-6.15", "identity-6.42",
                 "markus-7.10", "regular-type-3.9", "hilbert-3.4h", "prop-5.3", "prop-6.1",
                 "prop-6.2")

RECORD_KEYS = ("quantity", "space_hash", "lower", "upper", "method", "mesh", "seed")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field."""


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


def space_hash(space: NormedSpace, *bases) -> str:
    """Stable hash of a space descriptor and optional basis matrices."""
    blob = {"space": space.to_dict(),
            "bases": [np.round(np.asarray(B, dtype=float), 12).tolist() for B in bases]}
    text = json.dumps(blob, sort_keys=True, default=_json_default)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _joint_hash(A: NormedSpace, B: NormedSpace, *bases) -> str:
    text = space_hash(A, *bases) + space_hash(B)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    raise TypeError(type(o))


def make_record(quantity: str, shash: str | None, lower, upper, method: str, mesh, seed: int,
                **extra) -> dict:
    rec = {"quantity": quantity, "space_hash": shash, "lower": _num(lower), "upper": _num(upper),
           "method": method, "mesh": _num(mesh), "seed": int(seed)}
    for k, v in extra.items():
        rec[k] = _clean(v)
    return rec


def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (float, int, np.floating, np.integer, np.bool_)) and not isinstance(v, bool):
        return _num(v)
    return v


def _method_of(*spaces: NormedSpace) -> str:
    if all(s.is_euclidean for s in spaces):
        return Method.CLOSED_FORM.value
    if all(s.is_polyhedral for s in spaces):
        return Method.POLYHEDRAL_EXACT.value
    return Method.CERTIFIED_NET.value


class Emitter:
    """Writes records as JSON lines, optionally mirrored to CSV."""

    def __init__(self, out=None, csv_path: str | None = None, quiet: bool = False, err=None):
        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.quiet = quiet
        self.csv_path = csv_path
        self.records: list[dict] = []

    def emit(self, rec: dict):
        self.records.append(rec)
        self.out.write(json.dumps(rec) + "\n")
        self.out.flush()

    def say(self, text: str):
        if not self.quiet:
            self.err.write(text + "\n")

    def close(self):
        if not self.csv_path or not self.records:
            return
        keys = list(RECORD_KEYS)
        for r in self.records:
            keys += [k for k in r if k not in keys]
        with open(self.csv_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for r in self.records:
                w.writerow({k: (json.dumps(v) if isinstance(v, (dict, list)) else v)
                            for k, v in r.items()})


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class Document:
    spaces: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise ConfigError(f"{where}.{key}: required field is missing")
    return d[key]


def parse_document(raw) -> Document:
    """Validate a configuration mapping and build its spaces and subspaces."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>: expected a JSON object")
    doc = Document()
    spaces = raw.get("spaces", {})
    if not isinstance(spaces, dict):
        raise ConfigError("spaces: expected an object of named descriptors")
    for name, desc in spaces.items():
        _check_descriptor(desc, f"spaces.{name}")
        try:
            doc.spaces[name] = from_dict(desc)
        except (ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"spaces.{name}: {_describe(e)}") from None
    subs = raw.get("subspaces", {})
    if not isinstance(subs, dict):
        raise ConfigError("subspaces: expected an object of named bases")
    for name, desc in subs.items():
        where = f"subspaces.{name}"
        sname = _require(desc, "space", where)
        if sname not in doc.spaces:
            raise ConfigError(f"{where}.space: unknown space {sname!r}")
        X = doc.spaces[sname]
        vecs = _require(desc, "basis", where)
        try:
            V = np.asarray(vecs, dtype=float)
            if V.size == 0:
                V = np.zeros((0, X.dim))
            if V.ndim != 2 or V.shape[1] != X.dim:
                raise ValueError(f"expected a list of vectors of length {X.dim}")
            doc.subspaces[name] = Subspace(X, V.T)
        except (ValueError, TypeError) as e:
            raise ConfigError(f"{where}.basis: {_describe(e)}") from None
    tasks = _require(raw, "tasks", "<root>")
    if not isinstance(tasks, list):
        raise ConfigError("tasks: expected a list")
    for i, t in enumerate(tasks):
        q = _require(t, "quantity", f"tasks[{i}]")
        if q not in QUANTITIES:
            raise ConfigError(f"tasks[{i}].quantity: unknown quantity {q!r}")
        _validate_task(doc, t, i)
        doc.tasks.append(t)
    return doc


_DESCRIPTOR_FIELDS = {"lp": ("p", "dim"), "weighted_lp": ("p", "weights"),
                      "direct_sum": ("p", "summands"), "quotient": ("parent", "kernel"),
                      "dual": ("parent",), "pullback": ("parent", "matrix")}


def _check_descriptor(desc, where: str):
    """Field-level validation of a norm descriptor tree."""
    t = _require(desc, "type", where)
    if t not in _DESCRIPTOR_FIELDS:
        raise ConfigError(f"{where}.type: unknown space type {t!r}")
    for key in _DESCRIPTOR_FIELDS[t]:
        _require(desc, key, where)
    if "p" in _DESCRIPTOR_FIELDS[t]:
        try:
            parse_p(desc["p"])
        except (ValueError, TypeError) as e:
            raise ConfigError(f"{where}.p: {e}") from None
    if t == "lp":
        d = desc["dim"]
        if isinstance(d, bool) or not isinstance(d, int) or d < 0:
            raise ConfigError(f"{where}.dim: expected a non-negative integer")
    if t == "direct_sum":
        if not isinstance(desc["summands"], list) or not desc["summands"]:
            raise ConfigError(f"{where}.summands: expected a non-empty list")
        for i, sub in enumerate(desc["summands"]):
            _check_descriptor(sub, f"{where}.summands[{i}]")
    if "parent" in desc:
        _check_descriptor(desc["parent"], f"{where}.parent")


def _describe(e: Exception) -> str:
    return str(e.args[0]) if isinstance(e, KeyError) and e.args else str(e)


def _sub(doc: Document, t: dict, key: str, where: str) -> Subspace:
    name = _require(t, key, where)
    if name not in doc.subspaces:
        raise ConfigError(f"{where}.{key}: unknown subspace {name!r}")
    return doc.subspaces[name]


def _space_or_sub(doc: Document, name, where: str) -> NormedSpace:
    if name in doc.spaces:
        return doc.spaces[name]
    if name in doc.subspaces:
        return doc.subspaces[name].induced
    raise ConfigError(f"{where}: unknown space or subspace {name!r}")


def _validate_task(doc: Document, t: dict, i: int):
    where = f"tasks[{i}]"
    q = t["quantity"]
    if q in ("bm",):
        names = _require(t, "spaces", where)
        if not isinstance(names, list) or len(names) != 2:
            raise ConfigError(f"{where}.spaces: expected two names")
        A, B = (_space_or_sub(doc, n, f"{where}.spaces") for n in names)
        if A.dim != B.dim:
            raise ConfigError(f"{where}.spaces: dimensions differ")
    elif q == "gamma":
        dom = _space_or_sub(doc, _require(t, "domain", where), f"{where}.domain")
        cod = _space_or_sub(doc, _require(t, "codomain", where), f"{where}.codomain")
        try:
            LinearMap(np.asarray(_require(t, "matrix", where), dtype=float), dom, cod)
        except (ValueError, TypeError) as e:
            raise ConfigError(f"{where}.matrix: {e}") from None
    elif q == "h-index":
        _space_or_sub(doc, _require(t, "space", where), f"{where}.space")
        fam = _require(t, "family", where)
        try:
            Family(fam)
        except ValueError:
            raise ConfigError(f"{where}.family: unknown family {fam!r}") from None
        if t.get("mode", "pieces") not in ("pieces", "vectors"):
            raise ConfigError(f"{where}.mode: expected 'pieces' or 'vectors'")
        try:
            build_index_set(fam, **t.get("params", {}))
        except (ValueError, TypeError) as e:
            raise ConfigError(f"{where}.params: {e}") from None
    else:
        Y, Z = _sub(doc, t, "Y", where), _sub(doc, t, "Z", where)
        if not Y.same_space(Z):
            raise ConfigError(f"{where}.Z: Y and Z live in different spaces")
        if q == "inclination" and Z.dim == 0:
            raise ConfigError(f"{where}.Z: inclination needs a nonzero subspace")


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------

_GAPS = {"theta": theta, "theta0": theta0, "omega": omega, "omega0": omega0,
         "lambda": lambda_gap, "lambda0": lambda0}


def run_task(doc: Document, t: dict, cfg: Config) -> dict:
    """Evaluate one task into a record."""
    q = t["quantity"]
    seed = cfg.seed
    if q in _GAPS or q in ("inclination", "dg"):
        Y, Z = doc.subspaces[t["Y"]], doc.subspaces[t["Z"]]
        h = space_hash(Y.space, Y.basis, Z.basis)
        if q == "inclination":
            rep = inclination(Z, Y, cfg)
        else:
            rep = (theta if q == "dg" else _GAPS[q])(Y, Z, cfg)
        lo, up = rep.lower, rep.upper
        if q == "dg":
            lo, up = math.log1p(lo), math.log1p(up)
        return make_record(q, h, lo, up, rep.method.value, rep.mesh, seed, Y=t["Y"], Z=t["Z"])
    if q in ("r", "r0", "dop"):
        Y, Z = doc.subspaces[t["Y"]], doc.subspaces[t["Z"]]
        h = space_hash(Y.space, Y.basis, Z.basis)
        rep = r0_bounds(Y, Z, cfg) if q == "r0" else r_bounds(Y, Z, cfg)
        lo, up = rep.lower, rep.upper
        if q == "dop":
            lo, up = math.log1p(lo), math.log1p(up)
        return make_record(q, h, lo, up, rep.method.value, 0.0, seed, Y=t["Y"], Z=t["Z"])
    if q == "bm":
        A, B = (_space_or_sub(doc, n, "") for n in t["spaces"])
        v = bm_upper(A, B, cfg)
        return make_record(q, _joint_hash(A, B), 1.0, v, Method.MULTISTART.value,
                           None, seed, spaces=list(t["spaces"]))
    if q == "gamma":
        dom = _space_or_sub(doc, t["domain"], "")
        cod = _space_or_sub(doc, t["codomain"], "")
        T = LinearMap(np.asarray(t["matrix"], dtype=float), dom, cod)
        iv = min_modulus(T, cfg)
        return make_record(q, _joint_hash(dom, cod, T.matrix), iv.lower, iv.upper,
                           _method_of(dom, cod), None, seed)
    if q == "h-index":
        X = _space_or_sub(doc, t["space"], "")
        A = build_index_set(t["family"], **t.get("params", {}))
        res = h_index(X, A, cfg, mode=t.get("mode", "pieces"))
        return make_record(q, space_hash(X), res.lower, res.upper, res.upper_method, None, seed,
                           family=t["family"], params=t.get("params", {}))
    raise ConfigError(f"unknown quantity {q!r}")


def cmd_compute(path: str, cfg: Config, em: Emitter) -> int:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        em.err.write(f"config: file not found: {path}\n")
        return EXIT_CONFIG
    except json.JSONDecodeError as e:
        em.err.write(f"config: invalid JSON: {e}\n")
        return EXIT_CONFIG
    try:
        doc = parse_document(raw)
    except ConfigError as e:
        em.err.write(f"config error: {e}\n")
        return EXIT_CONFIG
    for i, t in enumerate(doc.tasks):
        rec = run_task(doc, t, cfg)
        rec["task"] = i
        em.emit(rec)
        em.say(f"[{i}] {rec['quantity']:<12} [{rec['lower']}, {rec['upper']}] {rec['method']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproductions
# ---------------------------------------------------------------------------


@dataclass
class Row:
    label: str
    relation: str       # "contains", "<=", ">=", "disjoint", "true"
    expected: float | None
    lower: float
    upper: float
    method: str
    mesh: float | None
    shash: str | None

    @property
    def ok(self) -> bool:
        if self.relation == "contains":
            return self.lower - 1e-12 <= self.expected <= self.upper + 1e-12
        if self.relation == "<=":
            return self.upper <= self.expected
        if self.relation == ">=":
            return self.lower >= self.expected
        if self.relation == "true":
            return bool(self.lower)
        raise ValueError(self.relation)


def _gap_row(label, expected, rep: GapReport, Y: Subspace, Z: Subspace, relation="contains"):
    return Row(label, relation, expected, rep.lower, rep.upper, rep.method.value, rep.mesh,
               space_hash(Y.space, Y.basis, Z.basis))


def _flag_row(label, ok: bool, shash=None, method="Derived"):
    return Row(label, "true", None, float(ok), float(ok), method, None, shash)


def _rep_example_310(cfg):
    X, Y1, Y2, Y3, exp = example_310(0.5, 1.0)
    pairs = (("theta(Y1,Y2)", Y1, Y2), ("theta(Y1,Y3)", Y1, Y3), ("theta(Y2,Y3)", Y2, Y3))
    return [_gap_row(lab, e, theta(A, B, cfg), A, B) for (lab, A, B), e in zip(pairs, exp)]


def _rep_example_314(cfg):
    ex = example_314(0.5)
    rows = []
    reps = {}
    for tag, (A, B), e in (("primal", ex.primal, ex.expected[0]), ("dual", ex.dual, ex.expected[1])):
        o, lam = omega(A, B, cfg), lambda_gap(A, B, cfg)
        reps[tag] = o
        rows.append(_gap_row(f"omega {tag}", e, o, A, B))
        rows.append(_gap_row(f"lambda {tag}", e, lam, A, B))
    p, d = reps["primal"], reps["dual"]
    rows.append(_flag_row("omega primal and dual enclosures disjoint",
                          p.lower > d.upper or d.lower > p.upper))
    return rows


def _rep_douady(cfg):
    rows = []
    for X in (Lp(1, 3), Lp(2, 3)):
        Y = Subspace(X, [[1.0], [1.0], [0.0]])
        for eps in (0.1, 0.25):
            pair = douady_pair(X, Y, eps)
            t = theta(pair.G0, pair.Geps, cfg)
            tag = f"{X!r} eps={eps:g}"
            mesh = cfg.mesh_for(pair.G0.dim)
            rows.append(_gap_row(f"theta(G0,Geps) {tag}", eps + mesh, t, pair.G0, pair.Geps, "<="))
            up, inv = pair.tau_bounds(X, cfg)
            h = space_hash(pair.ambient, pair.tau)
            rows.append(Row(f"|tau| {tag}", "<=", 1 + eps, up, up, _method_of(X), None, h))
            rows.append(Row(f"|tau^-1| {tag}", "<=", 1 / eps, inv, inv, _method_of(X), None, h))
    return rows


def _rep_kadets(cfg):
    rows = []
    for p, n in ((1.5, 2), (1.2, 4), (1.9, 4)):
        T, D = mazur_maps(p, n)
        _, imY, imZ, rep = kadets_glue(Lp(2, n), Lp(p, n), T, D, cfg)
        h = space_hash(imY.space, imY.basis, imZ.basis)
        tag = f"p={p:g} n={n}"
        rows.append(Row(f"kbound {tag}", "<=", kadets_bound(p) + 1e-6, rep.kbound, rep.kbound,
                        "NetSupremum", None, h))
        rows.append(Row(f"omega(imY,imZ) {tag}", "<=", rep.kbound + rep.net_slack,
                        rep.omega.lower, rep.omega.upper, rep.omega.method.value, rep.omega.mesh, h))
    return rows


def _rep_identity(cfg):
    worst = 0.0
    for b in np.linspace(0.0, 1.0, 10):
        for eps in np.linspace(0.01, 0.99, 10):
            worst = max(worst, abs(identity_642(float(eps), float(b)) - max(1 - b, b + eps)))
    a = math.sqrt(2) - 1
    v = identity_642(a, a * a)
    est = estimate_642()
    target = 2 * math.sqrt(2) - 2
    return [
        Row("max deviation over 100 grid points", "<=", 1e-12, worst, worst, "Exact", None, None),
        Row("value at b=a^2, eps=a", "contains", target, v - 1e-12, v + 1e-12, "Exact", None, None),
        Row("witness distance y0", "<=", target + 1e-9, est.y0_witness, est.y0_witness,
            "Witness", None, None),
        Row("witness distance y1", "<=", target + 1e-9, est.y1_witness, est.y1_witness,
            "Witness", None, None),
        Row("exact distance y0", "<=", target + 1e-9, est.y0_exact, est.y0_exact,
            Method.POLYHEDRAL_EXACT.value, None, None),
        Row("exact distance y1", "<=", target + 1e-9, est.y1_exact, est.y1_exact,
            Method.POLYHEDRAL_EXACT.value, None, None),
    ]


def _property_rows(name: str, cfg: Config, n: int):
    fn = PROPERTIES[name][0]
    res = fn(cfg.seed, n, cfg)
    rows = [Row(f"{res.passed} checks pass, {res.skipped} skipped", "<=", 0.0, res.failed,
                res.failed, "Derived", None, None),
            Row("worst margin lhs - rhs", "<=", 1e-7, res.worst, res.worst, "Derived", None, None)]
    for k, v in sorted(res.notes.items()):
        if k == "gamma_skip_rate":
            rows.append(Row("skip rate for vanishing modulus", "<=", 0.1, v, v, "Derived", None, None))
    return rows


def _rep_markus(cfg):
    return _property_rows("operators.markus", cfg, 20)


def _rep_regular_type(cfg):
    rows = []
    cases = ((np.array([[1.0, 0.0], [0.0, 2.0]]), 0.3 + 0.2j),
             (np.array([[1.0, 0.5], [0.0, 2.0], [0.0, 0.0]]), 0.1 - 0.4j),
             (np.array([[3.0], [1.0]]), 1.0 + 1.0j))
    for i, (A, alpha) in enumerate(cases):
        rep = regular_type_demo(A, alpha, cfg)
        m = max(rep.openings)
        shp = "x".join(map(str, A.shape))
        rows.append(Row(f"max theta, {shp} case {i}", "<=", 1 / 3 + 1e-3, 0.0, m,
                        Method.CLOSED_FORM.value, None, None))
        rows.append(_flag_row(f"defect constant, {shp} case {i}",
                              all(v == rep.base_null_dim for v in rep.null_dims)))
    return rows


def _rep_hilbert(cfg):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(6):
        d = 2 + i % 4
        X = Lp(2, d)
        k = 1 + i % (d - 1)
        Y = Subspace(X, rng.normal(size=(d, k)))
        Z = Subspace(X, Y.basis + 0.3 * rng.normal(size=(d, k)))
        h = hilbert_theta(Y, Z)
        rows.append(_gap_row(f"theta closed form, n={d} k={k}", h, theta(Y, Z, cfg), Y, Z))
        if k <= 2:
            rows.append(_gap_row(f"theta net, n={d} k={k}", h,
                                 theta(Y, Z, cfg.with_(force_net=True)), Y, Z))
        r = r0_bounds(Y, Z, cfg)
        rows.append(Row(f"r0, n={d} k={k}", "contains", h, r.lower, r.upper, r.method.value, None,
                        space_hash(X, Y.basis, Z.basis)))
    return rows


def _rep_prop53(cfg):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for X in (Lp(1, 3), Lp(np.inf, 3), Lp(2, 3)):
        for _ in range(2):
            Y = Subspace(X, rng.normal(size=(3, 1)))
            Z = Subspace(X, Y.basis + 0.05 * rng.normal(size=(3, 1)))
            rep = prop53_check(Y, Z, cfg)
            rows.append(Row(f"r0 vs projection bound, {X!r}", "<=", rep.bound, rep.r0_upper,
                            rep.r0_upper, Method.POLYHEDRAL_EXACT.value if X.is_polyhedral
                            else Method.CLOSED_FORM.value, None, space_hash(X, Y.basis, Z.basis)))
    return rows


def _rep_prop61(cfg):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for X in (Lp(1, 3), Lp(2, 3), Lp(np.inf, 3)):
        Y = Subspace(X, rng.normal(size=(3, 2)))
        Z = Subspace(X, Y.basis + 0.05 * rng.normal(size=(3, 2)))
        rep = prop61_check(Y, Z, cfg)
        rows.append(Row(f"distance estimate, {X!r}", "<=", rep.bound + 1e-3, rep.bm,
                        rep.check.lhs, Method.MULTISTART.value, None,
                        space_hash(X, Y.basis, Z.basis)))
    return rows


def _rep_prop62(cfg):
    rows = []
    cases = ((Lp(2, 2), Lp(1, 2), np.eye(2)), (Lp(1.5, 2), Lp(np.inf, 2), np.eye(2)),
             (Lp(1, 2), Lp(1, 2), np.array([[1.0, 0.2], [0.0, 1.0]])))
    eps = 0.05
    for A, B, U in cases:
        X, Yi, Zi, g = prop62_embed(A, B, U, eps, cfg)
        h = space_hash(X, Yi.basis, Zi.basis)
        tag = f"{A!r} vs {B!r}"
        rows.append(Row(f"isometry error Y, {tag}", "<=", 1e-6, g.isometry_error_y,
                        g.isometry_error_y, "Sampled", None, h))
        rows.append(Row(f"isometry error Z, {tag}", "<=", 1e-6, g.isometry_error_z,
                        g.isometry_error_z, "Sampled", None, h))
        rows.append(Row(f"omega, {tag}", "<=", g.target + eps, g.omega_upper, g.omega_upper,
                        Method.CERTIFIED_NET.value, eps, h))
        rows.append(Row(f"r0, {tag}", "<=", g.target + 1e-6, g.r0_upper, g.r0_upper,
                        Method.POLYHEDRAL_EXACT.value, None, h))
    return rows


_REPRO = {
    "example-3.10": _rep_example_310,
    "example-3.14": _rep_example_314,
    "douady-5.9": _rep_douady,
    "kadets-6.15": _rep_kadets,
    "identity-6.42": _rep_identity,
    "markus-7.10": _rep_markus,
    "regular-type-3.9": _rep_regular_type,
    "hilbert-3.4h": _rep_hilbert,
    "prop-5.3": _rep_prop53,
    "prop-6.1": _rep_prop61,
    "prop-6.2": _rep_prop62,
}


def reproduce_rows(name: str, cfg: Config) -> list[Row]:
    if name not in _REPRO:
        raise ConfigError(f"name: unknown reproduction {name!r}")
    return _REPRO[name](cfg)


def cmd_reproduce(name: str, cfg: Config, em: Emitter) -> int:
    try:
        rows = reproduce_rows(name, cfg)
    except ConfigError as e:
        em.err.write(f"{e}; choose from {', '.join(REPRODUCTIONS)}\n")
        return EXIT_CONFIG
    em.say(f"{'row':<52} {'relation':>8} {'expected':>14} {'lower':>14} {'upper':>14}  pass")
    for r in rows:
        em.emit(make_record(name, r.shash, r.lower, r.upper, r.method, r.mesh, cfg.seed,
                            label=r.label, relation=r.relation, expected=r.expected, ok=r.ok))
        exp = "" if r.expected is None else f"{r.expected:.10g}"
        em.say(f"{r.label:<52} {r.relation:>8} {exp:>14} {r.lower:>14.10g} {r.upper:>14.10g}  "
               f"{'yes' if r.ok else 'NO'}")
    return EXIT_OK if all(r.ok for r in rows) else EXIT_FAIL


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------


def cmd_suite(seed: int, size: str, cfg: Config, em: Emitter, names=None) -> int:
    totals = {"passed": 0, "failed": 0, "skipped": 0}
    failed = []
    for name in names or PROPERTIES:
        res = run_property(name, seed, size, cfg)
        d = res.as_dict()
        em.emit(make_record("property", None, res.worst, res.worst, "Property", None, seed,
                            name=name, size=size, passed=d["passed"], failed=d["failed"],
                            skipped=d["skipped"], notes=d["notes"]))
        em.say(f"{name:<45} pass {res.passed:>5}  fail {res.failed:>3}  skip {res.skipped:>3}")
        for k in totals:
            totals[k] += d[k]
        if not res.ok:
            failed.append(name)
    em.emit(make_record("summary", None, None, None, "Property", None, seed, size=size,
                        failed_properties=failed, **totals))
    em.say(f"summary: {totals['passed']} passed, {totals['failed']} failed, "
           f"{totals['skipped']} skipped")
    return EXIT_OK if not failed else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=1, help="random seed (default 1)")
    common.add_argument("--mesh", type=float, default=None, help="target enclosure width")
    common.add_argument("--budget", type=int, default=None, help="point budget per net")
    common.add_argument("--csv", metavar="PATH", default=None, help="also write records as CSV")
    common.add_argument("--quiet", action="store_true", help="suppress the table on stderr")

    p = _Parser(prog="banachgap", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("compute", parents=[common], help="evaluate the tasks of a JSON config")
    c.add_argument("--config", required=True, metavar="PATH")
    r = sub.add_parser("reproduce", parents=[common], help="run a named worked example")
    r.add_argument("name", help=", ".join(REPRODUCTIONS))
    s = sub.add_parser("suite", parents=[common], help="run the seeded property suite")
    s.add_argument("--size", choices=("smoke", "full"), default="smoke")
    s.add_argument("--only", action="append", default=None, metavar="PROPERTY",
                   help="run only the named property (repeatable)")
    return p


def main(argv=None, out=None, err=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    err = err or sys.stderr
    if args.mesh is not None and not args.mesh > 0:
        err.write("--mesh: must be positive\n")
        return EXIT_CONFIG
    if args.budget is not None and args.budget < 1:
        err.write("--budget: must be positive\n")
        return EXIT_CONFIG
    cfg = Config(seed=args.seed, mesh=args.mesh, strict_budget=args.command == "compute")
    if args.budget is not None:
        cfg = cfg.with_(budget=args.budget)
    em = Emitter(out, args.csv, args.quiet, err)
    try:
        if args.command == "compute":
            code = cmd_compute(args.config, cfg, em)
        elif args.command == "reproduce":
            code = cmd_reproduce(args.name, cfg, em)
        else:
            unknown = [n for n in (args.only or []) if n not in PROPERTIES]
            if unknown:
                err.write(f"--only: unknown property {unknown[0]!r}\n")
                return EXIT_CONFIG
            code = cmd_suite(args.seed, args.size, cfg, em, args.only)
    except (BudgetExceeded, PolyhedralTooLarge) as e:
        err.write(f"budget exceeded: {e}\n")
        code = EXIT_BUDGET
    em.close()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
