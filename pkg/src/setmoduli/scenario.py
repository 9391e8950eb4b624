"""Scenario files, run reports, CSV traces, and the canned reproductions.

A scenario is a JSON document selecting a mapping family, a nominal
parameter, a radius schedule, and a list of analyses.  Mathematical
outcomes (hypothesis failures, equality failures) are data in the report,
never process errors; only parse, validation, I/O, and precondition
problems raise.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _pkg_version
from . import families as fam
from . import geometry as geo
from ._backend import backend_name
from .errors import ScenarioValidationError, SetModuliError
from .estimation import (
    ModulusEstimate,
    RadiusSchedule,
    estimate_calmness,
    estimate_lipusc,
    sup_calmness_over_nominal,
    verify_equality,
)
from .exact import qp_canonical_modulus, sublevel_modulus
from .hypotheses import hypothesis_report

SCHEMA_VERSION = 1

ANALYSIS_KINDS = (
    "lipusc",
    "calmness",
    "sup_calmness",
    "exact_qp",
    "exact_sublevel",
    "hypotheses",
    "verify_equality",
)

EXAMPLE_IDS = (
    "lp_optimal",
    "lcp",
    "sip",
    "sublevel",
    "counterexample_sqrt",
    "counterexample_jump",
    "counterexample_escape",
)


@dataclass
class Analysis:
    kind: str
    options: dict = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    family: fam.MappingFamily
    nominal_parameter: np.ndarray
    schedule: RadiusSchedule
    analyses: list
    echo: dict = field(default_factory=dict)


@dataclass
class RunReport:
    scenario_name: str
    scenario_echo: dict
    results: list  # [(analysis_kind, result_object)]
    seed: int
    wall_time_s: float
    versions: dict

    def to_dict(self):
        return {
            "scenario": self.scenario_echo,
            "scenario_name": self.scenario_name,
            "seed": self.seed,
            "wall_time_s": self.wall_time_s,
            "versions": self.versions,
            "results": [
                {"analysis": kind, "result": serialize_result(res)}
                for kind, res in self.results
            ],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


# ---------------------------------------------------------------------------
# Building scenarios from JSON
# ---------------------------------------------------------------------------


def _require(d, key, typ, where):
    if key not in d:
        raise ScenarioValidationError(f"{where}.{key}", "missing required field")
    v = d[key]
    if typ is float and isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if typ is int and isinstance(v, int) and not isinstance(v, bool):
        return v
    if not isinstance(v, typ):
        raise ScenarioValidationError(
            f"{where}.{key}", f"expected {getattr(typ, '__name__', typ)}"
        )
    return v


def _matrix(d, key, where, optional=False):
    if key not in d:
        if optional:
            return None
        raise ScenarioValidationError(f"{where}.{key}", "missing required field")
    try:
        arr = np.asarray(d[key], dtype=float)
    except (TypeError, ValueError):
        raise ScenarioValidationError(f"{where}.{key}", "not a numeric array") from None
    return arr


def _build_norms(doc):
    spec = doc.get("norms", {})
    try:
        return geo.NormSpec(
            spec.get("parameter_norm", "chebyshev"),
            spec.get("image_norm", "euclidean"),
        )
    except ValueError as exc:
        raise ScenarioValidationError("norms", str(exc)) from None


def build_family(spec, norms, probe_directions=()):
    kind = _require(spec, "kind", str, "family")
    where = "family"
    if kind == "lp_feasible":
        A0 = _matrix(spec, "A0", where)
        b0 = _matrix(spec, "b0", where)
        mask_A = spec.get("perturb_A")
        mask_b = spec.get("perturb_b")
        return fam.lp_feasible_family(
            A0, b0,
            None if mask_A is None else np.asarray(mask_A, bool),
            None if mask_b is None else np.asarray(mask_b, bool),
            norms, probe_directions, spec.get("name"),
        )
    if kind == "lp_optimal_full":
        A0 = _matrix(spec, "A0", where)
        b0 = _matrix(spec, "b0", where)
        c0 = _matrix(spec, "c0", where)
        masks = [spec.get(k) for k in ("perturb_A", "perturb_b", "perturb_c")]
        masks = [None if m is None else np.asarray(m, bool) for m in masks]
        return fam.lp_optimal_family(A0, b0, c0, *masks, norms=norms,
                                     probe_directions=probe_directions,
                                     name=spec.get("name"))
    if kind == "qp_optimal_canonical":
        Q = _matrix(spec, "Q", where)
        A = _matrix(spec, "A", where)
        if A.size == 0:
            A = np.zeros((0, Q.shape[0]))
        return fam.qp_canonical_family(Q, A, norms, probe_directions,
                                       spec.get("name"))
    if kind == "qp_kkt_full":
        n = _require(spec, "n", int, where)
        m = _require(spec, "m", int, where)
        return fam.qp_kkt_family(n, m, norms, probe_directions, spec.get("name"))
    if kind == "lcp":
        n = _require(spec, "n", int, where)
        return fam.lcp_family(n, norms, probe_directions, spec.get("name"))
    if kind == "sip_grid":
        grid = spec.get("grid_points", 201)
        probes = probe_directions if probe_directions else None
        return fam.sip_family(grid, norms, probes, spec.get("name"))
    if kind == "sublevel_1d":
        token = spec.get("f")
        if token is None:
            raise ScenarioValidationError("family.f", "missing required field")
        domain = _matrix(spec, "domain", where)
        if domain.shape != (2,):
            raise ScenarioValidationError("family.domain", "expected [lo, hi]")
        try:
            f, fp = fam.resolve_function(token)
        except SetModuliError as exc:
            raise ScenarioValidationError("family.f", str(exc)) from None
        probes = probe_directions or (np.array([1.0]), np.array([-1.0]))
        return fam.sublevel_family(f, fp, domain, spec.get("grid_points", 2001),
                                   f_token=token, norms=norms,
                                   probe_directions=probes,
                                   name=spec.get("name"))
    if kind in ("counterexample_sqrt", "counterexample_jump", "counterexample_escape"):
        return fam.counterexample_family(kind, norms, spec.get("name"))
    raise ScenarioValidationError("family.kind", f"unknown kind {kind!r}")


def _build_schedule(doc):
    spec = doc.get("schedule", {})
    kwargs = dict(
        samples_per_radius=spec.get("samples_per_radius", 256),
        seed=spec.get("seed", 0),
        localization_radius_factor=spec.get("localization_radius_factor", 10.0),
    )
    try:
        if "radii" in spec:
            return RadiusSchedule(tuple(float(r) for r in spec["radii"]), **kwargs)
        return RadiusSchedule.geometric(
            r0=spec.get("r0", 1e-1), rho=spec.get("rho", 0.5),
            levels=spec.get("levels", 12), **kwargs,
        )
    except SetModuliError as exc:
        raise ScenarioValidationError("schedule", str(exc)) from None


_ANALYSES_BY_KIND = {
    "exact_qp": ("qp_optimal_canonical",),
    "exact_sublevel": ("sublevel_1d",),
}


def _build_analyses(doc, family, nominal_len):
    raw = doc.get("analyses")
    if not isinstance(raw, list) or not raw:
        raise ScenarioValidationError("analyses", "expected a non-empty list")
    out = []
    for i, entry in enumerate(raw):
        where = f"analyses[{i}]"
        if isinstance(entry, str):
            kind, options = entry, {}
        elif isinstance(entry, dict):
            kind = entry.get("kind")
            options = {k: v for k, v in entry.items() if k != "kind"}
        else:
            raise ScenarioValidationError(where, "expected string or object")
        if kind not in ANALYSIS_KINDS:
            raise ScenarioValidationError(where, f"unknown analysis {kind!r}")
        allowed = _ANALYSES_BY_KIND.get(kind)
        if allowed and family.kind not in allowed:
            raise ScenarioValidationError(
                where, f"{kind} is not valid for family kind {family.kind}"
            )
        if kind == "calmness":
            if "x" not in options:
                raise ScenarioValidationError(f"{where}.x", "calmness needs a point")
            options["x"] = np.asarray(options["x"], dtype=float).reshape(-1)
            if options["x"].shape[0] != family.image_dim:
                raise ScenarioValidationError(
                    f"{where}.x", f"expected length {family.image_dim}"
                )
        out.append(Analysis(kind, options))
    return out


def scenario_from_dict(doc, name=None):
    if not isinstance(doc, dict):
        raise ScenarioValidationError("$", "scenario document must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioValidationError(
            "schema_version", f"expected {SCHEMA_VERSION}, got {version!r}"
        )
    norms = _build_norms(doc)
    probes = [np.asarray(p, dtype=float) for p in doc.get("probe_directions", [])]
    family_spec = _require(doc, "family", dict, "$")
    family = build_family(family_spec, norms, tuple(probes))
    nominal = _matrix(doc, "nominal_parameter", "$")
    if nominal.ndim != 1 or nominal.shape[0] != family.parameter_dim:
        raise ScenarioValidationError(
            "nominal_parameter",
            f"expected a flat vector of length {family.parameter_dim} for the "
            f"{family.kind} packing, got shape {nominal.shape}",
        )
    schedule = _build_schedule(doc)
    analyses = _build_analyses(doc, family, nominal.shape[0])
    return Scenario(
        name=name or doc.get("name", family.name),
        family=family,
        nominal_parameter=nominal,
        schedule=schedule,
        analyses=analyses,
        echo=doc,
    )


def load_scenario(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError("$", f"invalid JSON: {exc}") from None
    return scenario_from_dict(doc, name=None)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _vec(v):
    return None if v is None else [float(x) for x in np.asarray(v).reshape(-1)]


def _witness(w):
    if w is None:
        return None
    p, x = w
    return {"param": _vec(p), "x": _vec(x)}


def serialize_result(res):
    if isinstance(res, ModulusEstimate):
        out = {
            "type": "modulus_estimate",
            "value": float(res.value),
            "classification": res.classification,
            "per_radius_worst": [[float(r), float(w)] for r, w in res.per_radius_worst],
            "attaining_witness": _witness(res.attaining_witness),
        }
        if res.per_probe is not None:
            out["per_probe"] = [
                {
                    "x": _vec(p),
                    "value": float(e.value),
                    "classification": e.classification,
                }
                for p, e in res.per_probe
            ]
        return out
    from .hypotheses import CheckResult, HypothesisVerdict

    if isinstance(res, HypothesisVerdict):
        def check(c):
            return {
                "status": c.status,
                "reason": c.reason,
                "witness": _witness(c.witness) if c.witness else None,
            }

        return {
            "type": "hypothesis_verdict",
            "osc": check(res.osc),
            "locally_bounded": check(res.locally_bounded),
            "theorem_applicable": res.theorem_applicable,
            "violated_premises": res.violated_premises(),
        }
    from .estimation import EqualityReport

    if isinstance(res, EqualityReport):
        return {
            "type": "equality_report",
            "verdict": res.verdict,
            "rel_tol": res.rel_tol,
            "inequality_satisfied": res.inequality_satisfied,
            "lipusc": serialize_result(res.lipusc),
            "sup_calmness": serialize_result(res.sup_calmness),
            "hypotheses": serialize_result(res.hypotheses),
        }
    if isinstance(res, dict):
        return res
    raise TypeError(f"cannot serialize {type(res).__name__}")


def _serialize_certificates(value, certificates):
    return {
        "type": "exact_qp",
        "value": float(value),
        "certificates": [
            {
                "D": list(cert.D),
                "A_D": np.asarray(cert.A_D).tolist(),
                "M_D": np.asarray(cert.M_D).tolist(),
                "multipliers": _vec(cert.multipliers),
                "partial_inverse_norm": float(cert.partial_inverse_norm),
                "norm_choice": cert.norm_choice,
            }
            for cert in certificates
        ],
    }


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def _run_analysis(analysis, scenario):
    family = scenario.family
    ybar = scenario.nominal_parameter
    schedule = scenario.schedule
    kind = analysis.kind
    if kind == "lipusc":
        return estimate_lipusc(family, ybar, schedule)
    if kind == "calmness":
        return estimate_calmness(family, ybar, analysis.options["x"], schedule)
    if kind == "sup_calmness":
        return sup_calmness_over_nominal(family, ybar, schedule=schedule)
    if kind == "hypotheses":
        return hypothesis_report(family, ybar, schedule)
    if kind == "verify_equality":
        rel_tol = float(analysis.options.get("rel_tol", 0.05))
        return verify_equality(family, ybar, schedule, rel_tol)
    if kind == "exact_qp":
        st = family.structure
        n = st.Q.shape[0]
        c0, b0 = ybar[:n], ybar[n:]
        norm_choice = analysis.options.get("norm_choice", "spectral")
        value, certs = qp_canonical_modulus(st.Q, st.A, c0, b0, norm_choice)
        return _serialize_certificates(value, certs)
    if kind == "exact_sublevel":
        st = family.structure
        res = sublevel_modulus(st.f, st.fprime, float(ybar[0]), st.domain,
                               st.grid_points)
        return {
            "type": "exact_sublevel",
            "value": float(res.value),
            "boundary_points": [float(b) for b in res.boundary_points],
            "vanishing_gradient": res.vanishing_gradient,
        }
    raise ScenarioValidationError("analyses", f"unknown analysis {kind!r}")


def _versions():
    import scipy

    return {
        "setmoduli": _pkg_version,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "qp_backend": backend_name(),
    }


def run_scenario(scenario, out_dir=None):
    """Execute a scenario (object or path) and return the run report.

    With ``out_dir`` the report is written as report.json and every
    modulus-estimate analysis emits a CSV trace.
    """
    if isinstance(scenario, (str, bytes)):
        scenario = load_scenario(scenario)
    t0 = time.perf_counter()
    results = []
    for analysis in scenario.analyses:
        results.append((analysis.kind, _run_analysis(analysis, scenario)))
    report = RunReport(
        scenario_name=scenario.name,
        scenario_echo=scenario.echo,
        results=results,
        seed=scenario.schedule.seed,
        wall_time_s=time.perf_counter() - t0,
        versions=_versions(),
    )
    if out_dir is not None:
        emit_report(report, out_dir)
        emit_traces(report, out_dir)
    return report


def emit_report(report, out_dir):
    import os

    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    return path


def _trace_rows(estimate):
    rows = []
    for (r, w), wit in zip(estimate.per_radius_worst, estimate.per_radius_witness):
        if wit is None:
            packed, xw = "", ""
        else:
            p, xv = wit
            packed = ";".join(repr(float(v)) for v in np.asarray(p).reshape(-1))
            xw = (
                ""
                if xv is None
                else ";".join(repr(float(v)) for v in np.asarray(xv).reshape(-1))
            )
        rows.append((repr(float(r)), repr(float(w)), packed, xw))
    return rows


def emit_traces(report, out_dir):
    """One CSV per modulus-estimate analysis: radius, worst quotient, and
    the witness pair; stable column order, header mandatory."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for i, (kind, res) in enumerate(report.results):
        estimates = []
        if isinstance(res, ModulusEstimate):
            estimates.append((f"{i:02d}_{kind}", res))
        else:
            from .estimation import EqualityReport

            if isinstance(res, EqualityReport):
                estimates.append((f"{i:02d}_{kind}_lipusc", res.lipusc))
                estimates.append((f"{i:02d}_{kind}_sup_calmness", res.sup_calmness))
        for name, est in estimates:
            path = os.path.join(out_dir, f"{name}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write("radius,worst_quotient,witness_param_packed,witness_x\n")
                for row in _trace_rows(est):
                    fh.write(",".join(row))
                    fh.write("\n")
            written.append(path)
    return written


# ---------------------------------------------------------------------------
# Canned reproductions of the built-in example suite
# ---------------------------------------------------------------------------


@dataclass
class TableRow:
    quantity: str
    expected: str
    computed: str
    tolerance: str
    passed: bool


def _num_row(quantity, expected, computed, rel_tol=None, abs_tol=None):
    if rel_tol is not None:
        ok = abs(computed - expected) <= rel_tol * max(1.0, abs(expected))
        tol = f"rel {rel_tol:g}"
    else:
        ok = abs(computed - expected) <= abs_tol
        tol = f"abs {abs_tol:g}"
    return TableRow(quantity, repr(float(expected)), repr(float(computed)), tol, ok)


def _label_row(quantity, expected, computed):
    return TableRow(quantity, str(expected), str(computed), "exact", expected == computed)


def _example_scenario_doc(example_id, seed):
    base_schedule = {"r0": 1e-1, "rho": 0.5, "levels": 12,
                     "samples_per_radius": 256, "seed": seed}
    if example_id == "lp_optimal":
        return {
            "schema_version": 1,
            "name": "lp_optimal_example",
            "family": {
                "kind": "lp_optimal_full",
                "A0": [[1.0], [-1.0]],
                "b0": [1.0, 0.0],
                "c0": [-1.0],
                "perturb_A": [[True], [False]],
                "perturb_b": [True, False],
                "perturb_c": [True],
            },
            "probe_directions": [[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0]],
            "nominal_parameter": [1.0, 1.0, -1.0],
            "schedule": base_schedule,
            "analyses": [
                {"kind": "calmness", "x": [1.0]},
                "lipusc",
                "hypotheses",
                "verify_equality",
            ],
        }
    if example_id == "lcp":
        return {
            "schema_version": 1,
            "name": "lcp_example",
            "family": {"kind": "lcp", "n": 1},
            "probe_directions": [[1.0, 1.0], [-1.0, -1.0]],
            "nominal_parameter": [-1.0, 1.0],
            "schedule": base_schedule,
            "analyses": [
                {"kind": "calmness", "x": [0.0]},
                {"kind": "calmness", "x": [1.0]},
                "lipusc",
                "hypotheses",
                "verify_equality",
            ],
        }
    if example_id == "sip":
        return {
            "schema_version": 1,
            "name": "sip_example",
            "family": {"kind": "sip_grid", "grid_points": 201},
            "nominal_parameter": [0.0, 0.0, 0.0, 0.0, 0.0],
            "schedule": base_schedule,
            "analyses": [
                {"kind": "calmness", "x": [1.0]},
                {"kind": "calmness", "x": [-1.0]},
                {"kind": "calmness", "x": [0.0]},
                {"kind": "calmness", "x": [0.35]},
                {"kind": "calmness", "x": [-0.62]},
                "lipusc",
                "hypotheses",
            ],
        }
    if example_id == "sublevel":
        return {
            "schema_version": 1,
            "name": "sublevel_sin_example",
            "family": {
                "kind": "sublevel_1d",
                "f": "sin",
                "domain": [-2 * math.pi, 2 * math.pi],
                "grid_points": 2001,
            },
            "nominal_parameter": [0.0],
            "schedule": base_schedule,
            "analyses": ["exact_sublevel", "lipusc", "hypotheses", "verify_equality"],
        }
    if example_id in ("counterexample_sqrt", "counterexample_jump",
                      "counterexample_escape"):
        return {
            "schema_version": 1,
            "name": example_id,
            "family": {"kind": example_id},
            "nominal_parameter": [0.0],
            "schedule": base_schedule,
            "analyses": ["lipusc", "sup_calmness", "hypotheses", "verify_equality"],
        }
    raise ScenarioValidationError("example_id", f"unknown example {example_id!r}")


_COUNTEREXAMPLE_PREMISE = {
    "counterexample_sqrt": "nominal_not_closed",
    "counterexample_jump": "outer_semicontinuity",
    "counterexample_escape": "local_boundedness",
}


def reproduce_paper(example_id, seed=0, out_dir=None):
    """Run the canonical scenario of a built-in example and compare against
    its registered values.  Returns (report, rows); mismatches are fail
    rows, never errors."""
    doc = _example_scenario_doc(example_id, seed)
    scenario = scenario_from_dict(doc)
    report = run_scenario(scenario, out_dir=out_dir)
    results = dict()
    for kind, res in report.results:
        results.setdefault(kind, []).append(res)

    rows = []
    if example_id == "lp_optimal":
        clm = results["calmness"][0]
        lip = results["lipusc"][0]
        eq = results["verify_equality"][0]
        rows.append(_num_row("clm @ x=1", 2.0, clm.value, rel_tol=0.03))
        rows.append(_num_row("lipusc", 2.0, lip.value, rel_tol=0.03))
        rows.append(_label_row("equality verdict", "equal", eq.verdict))
        rows.append(_label_row("hypotheses applicable", True,
                               results["hypotheses"][0].theorem_applicable))
    elif example_id == "lcp":
        clm0, clm1 = results["calmness"][0], results["calmness"][1]
        lip = results["lipusc"][0]
        sol = fam.solve_lcp_enumerate([[-1.0]], [1.0])
        sol_txt = sorted(round(float(p[0]), 9) for p in sol.points)
        rows.append(_num_row("clm @ x=0", 0.0, clm0.value, abs_tol=1e-6))
        rows.append(_num_row("clm @ x=1", 2.0, clm1.value, rel_tol=0.03))
        rows.append(_num_row("lipusc", 2.0, lip.value, rel_tol=0.03))
        rows.append(_label_row("solution set at (-1, 1)", [0.0, 1.0], sol_txt))
        rows.append(_label_row("equality verdict", "equal",
                               results["verify_equality"][0].verdict))
    elif example_id == "sip":
        labels = ["1", "-1", "0", "0.35", "-0.62"]
        for lbl, est in zip(labels[:2], results["calmness"][:2]):
            rows.append(_num_row(f"clm @ x={lbl}", 2.0, est.value, rel_tol=0.03))
        for lbl, est in zip(labels[2:], results["calmness"][2:]):
            rows.append(_num_row(f"clm @ interior x={lbl}", 0.0, est.value,
                                 abs_tol=1e-6))
        rows.append(_num_row("lipusc", 2.0, results["lipusc"][0].value, rel_tol=0.03))
        rows.append(_label_row("hypotheses applicable", True,
                               results["hypotheses"][0].theorem_applicable))
    elif example_id == "sublevel":
        ex = results["exact_sublevel"][0]
        lip = results["lipusc"][0]
        rows.append(_num_row("exact modulus", 1.0, ex["value"], abs_tol=1e-9))
        expected_boundary = [-2 * math.pi, -math.pi, 0.0, math.pi, 2 * math.pi]
        got = ex["boundary_points"]
        ok = len(got) == 5 and all(
            abs(a - b) <= 1e-9 for a, b in zip(sorted(got), expected_boundary)
        )
        rows.append(TableRow("boundary points",
                             "{-2pi, -pi, 0, pi, 2pi}",
                             "[" + ", ".join(f"{g:.9f}" for g in sorted(got)) + "]",
                             "abs 1e-09", ok))
        rows.append(_num_row("lipusc (sampled vs exact)", ex["value"], lip.value,
                             rel_tol=0.05))
        rows.append(_label_row("equality verdict", "equal",
                               results["verify_equality"][0].verdict))
    else:
        lip = results["lipusc"][0]
        sup = results["sup_calmness"][0]
        hypo = results["hypotheses"][0]
        rows.append(_label_row("lipusc classification", "infinite",
                               lip.classification))
        rows.append(_num_row("sup of calmness over nominal", 0.0, sup.value,
                             abs_tol=1e-6))
        rows.append(_label_row("violated premise",
                               [_COUNTEREXAMPLE_PREMISE[example_id]],
                               hypo.violated_premises()))
        rows.append(_label_row("equality verdict", "consistent_with_counterexample",
                               results["verify_equality"][0].verdict))
    return report, rows


def format_table(rows):
    headers = ("quantity", "paper value", "computed", "tolerance", "verdict")
    data = [
        (r.quantity, r.expected, r.computed, r.tolerance,
         "pass" if r.passed else "FAIL")
        for r in rows
    ]
    widths = [max(len(h), *(len(d[i]) for d in data)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for d in data:
        lines.append("  ".join(v.ljust(w) for v, w in zip(d, widths)))
    return "\n".join(lines)


def scenario_schema():
    """Machine-readable description of the scenario file format."""
    return {
        "$schema_version": SCHEMA_VERSION,
        "description": "setmoduli scenario file",
        "fields": {
            "schema_version": "int, must equal 1",
            "name": "str, optional",
            "family": {
                "kind": f"one of {list(fam.FAMILY_KINDS)}",
                "lp_feasible": {"A0": "matrix", "b0": "vector",
                                "perturb_A": "bool matrix (optional)",
                                "perturb_b": "bool vector (optional)"},
                "lp_optimal_full": {"A0": "matrix", "b0": "vector", "c0": "vector",
                                    "perturb_A/b/c": "bool masks (optional)"},
                "qp_optimal_canonical": {"Q": "sym psd matrix", "A": "matrix"},
                "qp_kkt_full": {"n": "int", "m": "int"},
                "lcp": {"n": "int (<= 12)"},
                "sip_grid": {"grid_points": "int, default 201"},
                "sublevel_1d": {"f": "'sin' | 'square' | {'poly': [coeffs]}",
                                "domain": "[lo, hi]",
                                "grid_points": "int, default 2001"},
                "counterexample_*": {},
            },
            "nominal_parameter": "flat vector in the family's documented packing "
                                 "(matrices row-major first, then vectors)",
            "norms": {"parameter_norm": "chebyshev|euclidean (default chebyshev)",
                      "image_norm": "chebyshev|euclidean (default euclidean)"},
            "probe_directions": "list of packed parameter directions (optional)",
            "schedule": {"r0": "float, default 0.1", "rho": "float, default 0.5",
                         "levels": "int, default 12",
                         "radii": "explicit list (overrides r0/rho/levels)",
                         "samples_per_radius": "int, default 256",
                         "seed": "int, default 0",
                         "localization_radius_factor": "float, default 10"},
            "analyses": f"non-empty list from {list(ANALYSIS_KINDS)}; "
                        "calmness entries are objects with an 'x' point",
        },
        "exit_codes": {"0": "completed (verdicts are data)",
                       "2": "validation error", "3": "I/O error",
                       "4": "solver or precondition failure"},
    }
