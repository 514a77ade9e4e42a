"""Batch driver: ``pqc verify <spec>`` runs the identity suites and writes a report.

A verification spec is a YAML (or JSON) document::

    n: 2
    suites: [algebra, heisenberg, conformal, cayley]
    h:                      # coefficient / monomial pairs
      - [2, "1"]
      - [1, "t1*x2"]
      - [-0.5, [0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]]   # exponent vector form
    sample_count: 5
    seed: 42
    point_box: [-1, 1]
    tolerances: {div: 1.0e-6}
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from pqc import paraquat as pq
from pqc.cayley import (
    SpherePoint,
    TangentVector,
    cayley_forward,
    cayley_inverse,
    sample_sphere_point,
    sample_tangent,
    verify_cayley_identity,
)
from pqc.conformal import (
    StencilOutOfDomain,
    calibrate_pairing,
    check_stencil,
    curvature_bar_closed_form,
    curvature_bar_direct,
    deform,
    derivative_data,
    torsion_forms_bar,
    verify_deformation_laws,
)
from pqc.heisenberg import model_verify
from pqc.invariants import (
    Residual,
    conformal_curvature,
    divergence_terms,
    flatness_verdict,
    make_residual,
    ricci_traces,
    torsion_forms,
    torsion_split,
    verify_pwr_properties,
    verify_structure_identities,
)
from pqc.jets import (
    Polynomial,
    ScalarField,
    UnknownCoordinate,
    coordinate_names,
    parse_monomial,
)
from pqc.tensor_core import (
    build_adapted_frame,
    casimir,
    casimir_project,
    four_part_split,
    structure_residuals,
)

log = logging.getLogger("pqc")

SUITES = ("algebra", "heisenberg", "conformal", "cayley")
MAX_REJECTIONS = 100

#: default tolerances per identity id; ids not listed fall back to EXACT_TOL
EXACT_TOL = 1e-10
CANCEL_TOL = 1e-7
FD_TOL = 1e-6
DEFAULT_TOLERANCES = {
    "norm_multiplicative": 1e-12,
    "unit_products": 1e-12,
    "associativity": 1e-12,
    "conj_antimultiplicative": 1e-12,
    "inverse": 1e-12,
    "pqc_algebra": 1e-12,
    "casimir_projectors": 1e-12,
    "four_part_split": 1e-12,
    "heisenberg": 1e-12,
    "curvature_direct": FD_TOL,
    "div": FD_TOL,
    "div_pipelines": FD_TOL,
    "zamiana": FD_TOL,
    "rjr": FD_TOL,
    "comp1": FD_TOL,
    "ricci": CANCEL_TOL,
    "ricciformf": CANCEL_TOL,
    "riccitau": CANCEL_TOL,
    "riccizeta": CANCEL_TOL,
    "ricis": CANCEL_TOL,
    "trfree": CANCEL_TOL,
    "main0": CANCEL_TOL,
    "qccm": CANCEL_TOL,
    "qcwdef1": CANCEL_TOL,
    "lll": CANCEL_TOL,
    "flatness": CANCEL_TOL,
    "yamabe_vs_trace": 1e-8,
    "cayley_identity": 1e-8,
}


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


class DomainExhausted(RuntimeError):
    """Too many consecutive sample points with h <= 0."""


# -- spec ---------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationSpec:
    n: int
    suites: tuple[str, ...]
    h: tuple[tuple[float, tuple[int, ...]], ...] = ()
    sample_count: int = 5
    seed: int = 42
    tolerances: dict = field(default_factory=dict)
    point_box: tuple[float, float] = (-1.0, 1.0)
    warnings: tuple[str, ...] = ()

    def tol(self, identity: str, tag: str | None = None) -> float:
        for key in (identity, tag):
            if key is not None and key in self.tolerances:
                return float(self.tolerances[key])
        for key in (identity, tag, identity.rsplit("_", 1)[0]):
            if key is not None and key in DEFAULT_TOLERANCES:
                return DEFAULT_TOLERANCES[key]
        return EXACT_TOL

    def scalar_field(self) -> ScalarField:
        return ScalarField(self.n, Polynomial.from_terms(4 * self.n + 3, self.h))


class _DupLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader: _DupLoader, node, deep=False):
    out = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in out:
            loader.duplicates.append(f"duplicate key {key!r} at line {key_node.start_mark.line + 1}; last value wins")
        out[key] = loader.construct_object(value_node, deep=deep)
    return out


_DupLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _parse_text(text: str, suffix: str) -> tuple[dict, list[str]]:
    dups: list[str] = []
    if suffix == ".json":
        def hook(pairs):
            out = {}
            for k, v in pairs:
                if k in out:
                    dups.append(f"duplicate key {k!r}; last value wins")
                out[k] = v
            return out

        try:
            data = json.loads(text, object_pairs_hook=hook)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        loader = _DupLoader(text)
        loader.duplicates = dups
        try:
            data = loader.get_single_data()
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
            raise ParseError(f"{where}{getattr(exc, 'problem', exc)}") from exc
        finally:
            loader.dispose()
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ParseError("top level must be a mapping")
    return data, dups


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)


def _parse_terms(raw, n: int, problems: list[str]) -> list[tuple[float, tuple[int, ...]]]:
    nv = 4 * n + 3
    terms = []
    if not isinstance(raw, list):
        problems.append("h: expected a list of [coefficient, monomial] pairs")
        return terms
    for i, item in enumerate(raw):
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            problems.append(f"h[{i}]: expected [coefficient, monomial]")
            continue
        coef, mono = item
        if not _is_real(coef):
            problems.append(f"h[{i}]: coefficient {coef!r} is not a number")
            continue
        if isinstance(mono, str):
            try:
                exps = parse_monomial(mono, n)
            except UnknownCoordinate as exc:
                problems.append(f"h[{i}]: {exc}")
                continue
        elif isinstance(mono, (list, tuple)):
            if len(mono) != nv or not all(_is_int(e) and e >= 0 for e in mono):
                problems.append(
                    f"h[{i}]: exponent vector must have {nv} non-negative integers ({', '.join(coordinate_names(n))})"
                )
                continue
            exps = tuple(int(e) for e in mono)
        else:
            problems.append(f"h[{i}]: monomial must be a string or exponent vector")
            continue
        terms.append((float(coef), exps))
    return terms


def validate_spec(data: dict, warnings: list[str] | None = None) -> VerificationSpec:
    """Check every field, collecting all problems before raising."""
    problems: list[str] = []
    known = {"n", "suites", "h", "sample_count", "seed", "tolerances", "point_box"}
    for key in sorted(set(data) - known, key=str):
        problems.append(f"unknown field {key!r}")
    n = data.get("n")
    if not (_is_int(n) and n >= 1):
        problems.append(f"n: must be an integer >= 1, got {n!r}")
        n = None
    suites = data.get("suites", list(SUITES))
    if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
        problems.append("suites: expected a list of suite names")
        suites = []
    for s in suites:
        if s not in SUITES:
            problems.append(f"suites: unknown suite {s!r} (choose from {', '.join(SUITES)})")
    terms = _parse_terms(data.get("h", []), n, problems) if n is not None else []
    if "conformal" in suites and not data.get("h"):
        problems.append("h: required when the conformal suite is selected")
    count = data.get("sample_count", 5)
    if not (_is_int(count) and count >= 1):
        problems.append(f"sample_count: must be an integer >= 1, got {count!r}")
    seed = data.get("seed", 42)
    if not (_is_int(seed) and 0 <= seed < 2**64):
        problems.append(f"seed: must be an integer in [0, 2^64), got {seed!r}")
    tols = data.get("tolerances", {}) or {}
    if not isinstance(tols, dict):
        problems.append("tolerances: expected a mapping identity -> tolerance")
        tols = {}
    for k, v in tols.items():
        if not (_is_real(v) and v > 0):
            problems.append(f"tolerances.{k}: must be a positive number, got {v!r}")
    box = data.get("point_box", [-1.0, 1.0])
    if _is_real(box):
        box = [-abs(box), abs(box)]
    if not (isinstance(box, list) and len(box) == 2 and all(_is_real(b) for b in box) and box[0] < box[1]):
        problems.append(f"point_box: expected [lo, hi] with lo < hi, got {box!r}")
        box = [-1.0, 1.0]
    if problems:
        raise ValidationError(problems)
    return VerificationSpec(
        n=int(n),
        suites=tuple(suites),
        h=tuple(terms),
        sample_count=int(count),
        seed=int(seed),
        tolerances={str(k): float(v) for k, v in tols.items()},
        point_box=(float(box[0]), float(box[1])),
        warnings=tuple(warnings or ()),
    )


def load_spec(path) -> VerificationSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    data, dups = _parse_text(text, path.suffix.lower())
    for w in dups:
        log.warning("%s: %s", path, w)
    return validate_spec(data, dups)


# -- report -------------------------------------------------------------------

@dataclass
class Entry:
    identity: str
    tag: str
    points: int
    max_residual: float
    scale: float
    passed: bool

    def as_json(self) -> dict:
        return {
            "identity": self.identity,
            "tag": self.tag,
            "points_evaluated": self.points,
            "max_residual": _fmt(self.max_residual),
            "scale": _fmt(self.scale),
            "pass": bool(self.passed),
        }


@dataclass
class Report:
    environment: dict
    suites: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(e.passed for entries in self.suites.values() for e in entries)

    def as_json(self) -> dict:
        return {
            "environment": self.environment,
            "suites": {k: [e.as_json() for e in v] for k, v in sorted(self.suites.items())},
            "warnings": list(self.warnings),
            "overall": self.overall,
        }


def _fmt(x: float) -> str:
    return format(float(x), ".16e")


def _aggregate(records: list[Residual]) -> list[Entry]:
    """Merge per-point residual records by identity, keeping the worst point."""
    out: dict[str, Entry] = {}
    for r in records:
        e = out.get(r.identity)
        if e is None:
            out[r.identity] = Entry(r.identity, r.tag, 1, r.max_residual, r.scale, r.passed)
            continue
        worse = r.relative > (e.max_residual / e.scale if e.scale > 0 else e.max_residual)
        e.points += 1
        e.passed = e.passed and r.passed
        if worse:
            e.max_residual, e.scale = r.max_residual, r.scale
    return sorted(out.values(), key=lambda e: e.identity)


def _retol(spec: VerificationSpec, r: Residual) -> Residual:
    return Residual(r.identity, r.tag, r.max_residual, r.scale, spec.tol(r.identity, r.tag))


# -- suites -------------------------------------------------------------------

def _rand_pq(rng, k):
    return [pq.ParaQuaternion.from_array(a) for a in rng.uniform(-1.0, 1.0, size=(k, 4))]


def algebra_suite(spec: VerificationSpec, rng: np.random.Generator, pairs: int = 10_000) -> list[Residual]:
    recs = []
    A = rng.uniform(-1.0, 1.0, size=(pairs, 4))
    B = rng.uniform(-1.0, 1.0, size=(pairs, 4))
    worst, worst_scale = 0.0, 1.0
    for a, b in zip(A, B):
        p, q = pq.ParaQuaternion.from_array(a), pq.ParaQuaternion.from_array(b)
        lhs, rhs = (p * q).norm2(), p.norm2() * q.norm2()
        # relative to the size of the factors, since norm2 can cancel to 0
        scale = (a @ a) * (b @ b)
        if abs(lhs - rhs) / scale > worst / worst_scale:
            worst, worst_scale = abs(lhs - rhs), scale
    recs.append(Residual("norm_multiplicative", "paraq", worst, worst_scale, spec.tol("norm_multiplicative")))

    units = {"r1": pq.R1, "r2": pq.R2, "r3": pq.R3}
    expected = {
        ("r1", "r1"): pq.ONE, ("r2", "r2"): pq.ONE, ("r3", "r3"): -pq.ONE,
        ("r1", "r2"): pq.R3, ("r2", "r1"): -pq.R3, ("r2", "r3"): -pq.R1,
        ("r3", "r2"): pq.R1, ("r3", "r1"): -pq.R2, ("r1", "r3"): pq.R2,
    }
    err = max(max(abs(x) for x in units[a] * units[b] - v) for (a, b), v in expected.items())
    recs.append(Residual("unit_products", "paraq", err, 1.0, spec.tol("unit_products")))

    ps, qs, rs = _rand_pq(rng, 200), _rand_pq(rng, 200), _rand_pq(rng, 200)
    assoc = max(max(abs(x) for x in (p * q) * r - p * (q * r)) for p, q, r in zip(ps, qs, rs))
    recs.append(Residual("associativity", "paraq", assoc, 1.0, spec.tol("associativity")))
    anti = max(max(abs(x) for x in (p * q).conj() - q.conj() * p.conj()) for p, q in zip(ps, qs))
    recs.append(Residual("conj_antimultiplicative", "paraq", anti, 1.0, spec.tol("conj_antimultiplicative")))
    inv_err = 0.0
    for p in ps:
        if abs(p.norm2()) > 0.05:
            inv_err = max(inv_err, max(abs(x) for x in p * p.inv() - pq.ONE))
    recs.append(Residual("inverse", "paraq", inv_err, 1.0, spec.tol("inverse")))

    frame = build_adapted_frame(spec.n)
    struct = max(structure_residuals(frame).values())
    recs.append(Residual("pqc_algebra", "paraq", struct, 1.0, spec.tol("pqc_algebra")))
    N = frame.dim
    proj = 0.0
    split_err = 0.0
    for _ in range(100):
        T = rng.normal(size=(N, N))
        t3, tm1 = casimir_project(T, frame)
        proj = max(
            proj,
            float(np.max(np.abs(casimir_project(t3, frame)[0] - t3))),
            float(np.max(np.abs(casimir_project(tm1, frame)[1] - tm1))),
            float(np.max(np.abs(t3 + tm1 - T))),
            float(np.max(np.abs(casimir(t3, frame) - 3.0 * t3))),
            float(np.max(np.abs(casimir(tm1, frame) + tm1))),
        )
        parts = four_part_split(T, frame)
        split_err = max(split_err, float(np.max(np.abs(sum(parts.values()) - T))))
        for key, P in parts.items():
            if key.count("-") % 2 == 1:
                split_err = max(split_err, float(np.max(np.abs(P))))
    recs.append(Residual("casimir_projectors", "casimir", proj, 1.0, spec.tol("casimir_projectors")))
    recs.append(Residual("four_part_split", "casimir", split_err, 1.0, spec.tol("four_part_split")))
    return recs


_HEISENBERG_IDS = {
    "Theta_s(H) = 0": ("horizontal_kernel", "pqh"),
    "eta_s(xi_t) = delta_st": ("reeb_normalisation", "xi"),
    "(xi_s _| d eta_s)|H = 0": ("reeb_contraction", "xi"),
    "(xi_j _| d eta_i)|H = eps_k (xi_i _| d eta_j)|H": ("reeb_contraction_mixed", "xi"),
    "-2 eps_s g(I_s X, Y) = d eta_s(X, Y)": ("compatibility", "ccon"),
    "[X,Y]_V = 2 sum eps_s omega_s(X,Y) xi_s": ("bracket_law", "torha"),
    "[xi_s, .] = 0 (tau = mu = 0)": ("reeb_central", "torha"),
    "[J_iT_a,T_a] = -2eps_i xi_i": ("commutator_J", "comm"),
    "[I_iT_a,I_jT_a] = 2eps_k xi_k": ("commutator_I", "comm"),
    "structure equations d Theta_s": ("structure_equations", "pqh"),
    "flat curvature R|H = 0": ("flat_curvature", "hflat"),
}


def heisenberg_suite(spec: VerificationSpec, rng: np.random.Generator) -> list[Residual]:
    res = model_verify(spec.n, points=spec.sample_count, seed=int(rng.integers(2**63)))
    out = []
    for key, value in res.items():
        ident, tag = _HEISENBERG_IDS.get(key, (key, "heisenberg"))
        out.append(Residual(ident, tag, float(value), 1.0, spec.tol(ident, "heisenberg")))
    return out


def _sample_points(spec: VerificationSpec, h: ScalarField, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    lo, hi = spec.point_box
    pts = []
    rejected = 0
    while len(pts) < count:
        u = rng.uniform(lo, hi, size=4 * spec.n + 3)
        if h(u) > 0:
            pts.append(u)
            rejected = 0
            continue
        rejected += 1
        if rejected >= MAX_REJECTIONS:
            raise DomainExhausted(f"{MAX_REJECTIONS} consecutive samples with h <= 0")
    return pts


def conformal_point(spec: VerificationSpec, h: ScalarField, u: np.ndarray, pairing: str) -> list[Residual]:
    """All deformation checks at one point."""
    d = deform(h, u)
    fr = d.bar_frame
    R = curvature_bar_closed_form(d, pairing)
    direct = curvature_bar_direct(d)
    recs = [make_residual("curvature_direct", "qcw4", [R, -direct], 0.0, float(np.max(np.abs(direct))))]
    recs += verify_deformation_laws(d, R)
    pack = ricci_traces(R, fr)
    split = torsion_split(torsion_forms_bar(d), fr)
    back = torsion_split(torsion_forms(split.tau, split.mu, fr), fr)
    recs.append(make_residual("torsion_round_trip", "t1", [back.tau - split.tau, back.mu - split.mu], 0.0,
                              float(np.max(np.abs(split.tau)))))
    recs += verify_pwr_properties(pack, split, fr)
    jets = derivative_data(d, "jets")
    recs += verify_structure_identities(pack, split, jets, fr)
    stencil = derivative_data(d, "stencil")
    a, b = sum(divergence_terms(split, jets, fr)), sum(divergence_terms(split, stencil, fr))
    scale = max(float(np.max(np.abs(t))) for t in divergence_terms(split, jets, fr))
    scale = max(scale, float(np.max(np.abs(jets.dscal))) / (8.0 * d.n * (d.n + 2)))
    recs.append(make_residual("div_pipelines", "div", [a, -b], 0.0, scale))
    cc = conformal_curvature(pack, split, fr)
    _ok, size = flatness_verdict(cc.W, R, spec.tol("flatness"))
    recs.append(Residual("flatness", "main1", size, max(1.0, float(np.max(np.abs(R)))), spec.tol("flatness")))
    return [_retol(spec, r) for r in recs]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PQC_THREADS", "1")))
    except ValueError:
        return 1


def conformal_suite(spec: VerificationSpec, rng: np.random.Generator) -> tuple[list[Residual], str, list[str]]:
    h = spec.scalar_field()
    notes = []
    usable = []
    rejected = 0
    while len(usable) < spec.sample_count:
        u = _sample_points(spec, h, rng, 1)[0]
        try:
            check_stencil(h, u)
        except StencilOutOfDomain:
            # stencils leaving {h > 0} count as rejected samples
            rejected += 1
            if rejected >= MAX_REJECTIONS:
                raise DomainExhausted(f"{MAX_REJECTIONS} consecutive stencils leave h > 0") from None
            continue
        rejected = 0
        usable.append(u)
    pairing, errs = calibrate_pairing(deform(h, usable[0]))
    notes.append(
        f"curvature pairing calibrated to {pairing!r} "
        + ", ".join(f"{k}: {_fmt(v)}" for k, v in sorted(errs.items()))
    )
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda u: conformal_point(spec, h, u, pairing), usable))
    return [r for rs in results for r in rs], pairing, notes


def cayley_suite(spec: VerificationSpec, rng: np.random.Generator) -> list[Residual]:
    n = spec.n
    recs = []
    base = SpherePoint.base(n)
    _q0, p0 = cayley_forward(base)
    v0 = TangentVector(tuple(pq.ParaQuaternion() for _ in range(n)), pq.R3)
    r0, s0 = verify_cayley_identity(base, v0)
    recs.append(Residual("cayley_base_point", "cal", max(r0, max(abs(x) for x in p0)), s0, spec.tol("cayley_identity")))
    for _ in range(spec.sample_count):
        pt = sample_sphere_point(rng, n)
        v = sample_tangent(rng, pt)
        r, s = verify_cayley_identity(pt, v)
        recs.append(Residual("cayley_identity", "cal", r, s, spec.tol("cayley_identity")))
        qp, pp = cayley_forward(pt)
        back = cayley_inverse(qp, pp)
        trip = max(max(abs(x) for x in a - b) for a, b in zip((*back.q, back.p), (*pt.q, pt.p)))
        recs.append(Residual("cayley_round_trip", "cay", trip, 1.0, spec.tol("cayley_round_trip")))
        emb = pp.re() + sum(x.norm2() for x in qp)
        size = max(abs(pp.re()), 1.0)
        recs.append(Residual("sigma_embedding", "cay", abs(emb), size, spec.tol("sigma_embedding")))
    return recs


def run_suite(spec: VerificationSpec) -> Report:
    env = {
        "n": spec.n,
        "seed": spec.seed,
        "sample_count": spec.sample_count,
        "point_box": [spec.point_box[0], spec.point_box[1]],
        "suites": list(spec.suites),
        "tolerances": {k: spec.tolerances[k] for k in sorted(spec.tolerances)},
    }
    report = Report(env, warnings=list(spec.warnings))
    # each suite gets its own stream so that selecting suites never shifts samples
    streams = dict(zip(SUITES, np.random.SeedSequence(spec.seed).spawn(len(SUITES))))
    for name in SUITES:
        if name not in spec.suites:
            continue
        rng = np.random.default_rng(streams[name])
        if name == "algebra":
            recs = algebra_suite(spec, rng)
        elif name == "heisenberg":
            recs = heisenberg_suite(spec, rng)
        elif name == "conformal":
            recs, pairing, notes = conformal_suite(spec, rng)
            env["curvature_pairing"] = pairing
            report.warnings.extend(notes)
        else:
            recs = cayley_suite(spec, rng)
        report.suites[name] = _aggregate(recs)
    return report


def render_json(report: Report) -> str:
    return json.dumps(report.as_json(), indent=2, sort_keys=True) + "\n"


def render_text(report: Report) -> str:
    lines = [f"pqc verification  n={report.environment['n']}  seed={report.environment['seed']}"]
    rows = [(suite, e) for suite, entries in sorted(report.suites.items()) for e in entries]
    rows.sort(key=lambda r: (r[1].passed, r[0], r[1].identity))
    if rows:
        lines.append(f"{'':4} {'suite':10} {'identity':26} {'tag':10} {'pts':>4} {'residual':>11} {'scale':>11}")
    for suite, e in rows:
        flag = "ok" if e.passed else "FAIL"
        lines.append(
            f"{flag:4} {suite:10} {e.identity:26} {e.tag:10} {e.points:4d} {e.max_residual:11.3e} {e.scale:11.3e}"
        )
    for w in report.warnings:
        lines.append(f"note: {w}")
    lines.append("overall: " + ("PASS" if report.overall else "FAIL"))
    return "\n".join(lines) + "\n"


def write_report(report: Report, path=None, fmt: str = "json") -> None:
    text = render_json(report) if fmt == "json" else render_text(report)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pqc", description="Verify paraquaternionic contact identities numerically.")
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run the suites listed in a verification spec")
    v.add_argument("spec", help="YAML or JSON verification spec")
    v.add_argument("--format", choices=("json", "text"), default="text")
    v.add_argument("--out", default=None, help="write the report here instead of stdout")
    v.add_argument("--seed", type=int, default=None, help="override the spec seed")
    v.add_argument("--points", type=int, default=None, help="override sample_count")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        if args.seed is not None or args.points is not None:
            data = {
                "n": spec.n, "suites": list(spec.suites), "h": [[c, list(e)] for c, e in spec.h],
                "sample_count": spec.sample_count if args.points is None else args.points,
                "seed": spec.seed if args.seed is None else args.seed,
                "tolerances": dict(spec.tolerances), "point_box": list(spec.point_box),
            }
            spec = validate_spec(data, list(spec.warnings))
        report = run_suite(spec)
        write_report(report, args.out, args.format)
    except (ParseError, ValidationError) as exc:
        log.error("%s", exc)
        return 2
    except DomainExhausted as exc:
        log.error("%s", exc)
        return 3
    except OSError as exc:
        log.error("cannot write report: %s", exc)
        return 4
    return 0 if report.overall else 1


if __name__ == "__main__":
    sys.exit(main())
