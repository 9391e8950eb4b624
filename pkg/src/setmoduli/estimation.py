"""Sampling estimators for calmness and Lipschitz upper-semicontinuity
moduli, and the verifier of the local-to-semilocal equality.

Both moduli are upper limits of the quotient

    d(x, M(nominal)) / d(parameter, nominal_parameter)

over graph points approaching the nominal data; calmness additionally
restricts the image point to a localization ball that shrinks with the
parameter radius.  The estimators discretize the limit on a shrinking
radius schedule, recording the worst quotient per radius level.  They are
certified lower bounds by construction (finitely many samples); fixtures
register analytic worst-case probe directions so known values are attained
rather than approached blindly.

Conventions: an empty perturbed image contributes 0 (the supremum over the
empty set is absorbed by the upper limit), and a quotient whose numerator
is below the distance tolerance is 0 before division (the 0/0 := 0 rule).

Determinism: the parameter stream at each radius level depends only on
(schedule.seed, level), never on which estimate consumes it.  This makes
the calmness quotients at any probe a sub-collection of the semilocal
quotients level by level, so the estimated semilocal modulus dominates the
estimated calmness supremum structurally, not just in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import PreconditionError
from .families import evaluate, sample_parameters
from .geometry import restrict_to_box, sup_distance_over_set

INF = float("inf")

# numerator below this is treated as 0 before division (0/0 := 0)
DISTANCE_TOL = 1e-9
MEMBERSHIP_TOL = 1e-6

# Tail classification: "finite" when the last three levels agree within
# STABILIZE_RTOL; "infinite" when the last GROWTH_WINDOW levels grow
# monotonically (each step by >= GROWTH_STEP) to a total factor >=
# GROWTH_FACTOR.  The defaults separate square-root, linear, and quadratic
# parameter-blowups from every stabilizing fixture with wide margins.
STABILIZE_RTOL = 0.02
GROWTH_FACTOR = 2.0
GROWTH_WINDOW = 4
GROWTH_STEP = 1.05

SUP_BUDGET = 512


@dataclass(frozen=True)
class RadiusSchedule:
    """Shrinking-neighborhood protocol discretizing the upper limits."""

    radii: tuple
    samples_per_radius: int = 256
    seed: int = 0
    localization_radius_factor: float = 10.0

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(r <= 0 for r in radii):
            raise PreconditionError("radii must be positive")
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise PreconditionError("radii must be strictly decreasing")
        if self.samples_per_radius < 1:
            raise PreconditionError("samples_per_radius must be >= 1")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def geometric(cls, r0=1e-1, rho=0.5, levels=12, samples_per_radius=256,
                  seed=0, localization_radius_factor=10.0):
        radii = tuple(r0 * rho**k for k in range(levels))
        return cls(radii, samples_per_radius, seed, localization_radius_factor)

    @classmethod
    def default(cls, seed=0):
        return cls.geometric(seed=seed)


@dataclass
class ModulusEstimate:
    """A discretized upper-limit estimate.

    ``per_radius_worst`` holds (radius, worst quotient) per level;
    ``value`` is the plain maximum of the last two levels (+inf when
    classified infinite); ``attaining_witness`` is the (parameter, image
    point) pair realizing the final level's worst quotient.
    """

    per_radius_worst: tuple
    value: float
    classification: str
    attaining_witness: tuple | None = None
    per_radius_witness: tuple = ()
    per_probe: tuple | None = None  # set by the nominal-supremum estimator

    def worst_values(self):
        return [w for (_, w) in self.per_radius_worst]


def classify_tail(values, stabilize_rtol=STABILIZE_RTOL,
                  growth_factor=GROWTH_FACTOR, growth_window=GROWTH_WINDOW,
                  growth_step=GROWTH_STEP, zero_tol=1e-12):
    """Classify a per-level worst sequence as finite / infinite / inconclusive."""
    v = [float(x) for x in values]
    if not v:
        return "inconclusive"
    tail = v[-3:]
    if any(math.isinf(x) for x in tail):
        return "infinite"
    if len(v) >= growth_window:
        w = v[-growth_window:]
        if (
            w[0] > zero_tol
            and w[-1] >= growth_factor * w[0]
            and all(b >= growth_step * a for a, b in zip(w, w[1:]))
        ):
            return "infinite"
    if len(v) >= 3:
        hi, lo = max(tail), min(tail)
        if hi <= zero_tol or hi - lo <= stabilize_rtol * hi:
            return "finite"
    return "inconclusive"


def _finalize(levels, witnesses):
    values = [w for (_, w) in levels]
    classification = classify_tail(values)
    if classification == "infinite":
        value = INF
    else:
        value = max(values[-2:]) if len(values) >= 2 else values[-1]
    return ModulusEstimate(
        per_radius_worst=tuple(levels),
        value=value,
        classification=classification,
        attaining_witness=witnesses[-1] if witnesses else None,
        per_radius_witness=tuple(witnesses),
    )


def _level_seed(schedule, level):
    return int(schedule.seed) * 1_000_003 + level


def _sweep(family, ybar, schedule, probes=None, want_semilocal=True,
           budget=SUP_BUDGET):
    """One pass over the radius schedule computing the semilocal table
    and/or the localized tables of every probe from shared evaluations."""
    ybar = np.asarray(ybar, dtype=float).reshape(-1)
    nominal = evaluate(family, ybar)
    if nominal.is_empty:
        raise PreconditionError("nominal image is empty: parameter not in the domain")
    probes = [np.asarray(p, dtype=float).reshape(-1) for p in (probes or [])]
    norm = family.norms.image_norm
    loc = schedule.localization_radius_factor

    lip_levels, lip_wits = [], []
    probe_levels = [[] for _ in probes]
    probe_wits = [[] for _ in probes]

    n_samples = schedule.samples_per_radius + len(family.probe_directions)
    for k, r in enumerate(schedule.radii):
        params = sample_parameters(family, ybar, r, n_samples,
                                   _level_seed(schedule, k))
        lip_worst, lip_wit = 0.0, None
        pr_worst = [0.0] * len(probes)
        pr_wit = [None] * len(probes)
        for p in params:
            dist = family.parameter_distance(p, ybar)
            if dist <= 0.0:
                continue
            image = evaluate(family, p)
            if image.is_empty:
                continue
            if want_semilocal:
                res = sup_distance_over_set(image, nominal, norm, budget)
                q = 0.0 if res.value <= DISTANCE_TOL else res.value / dist
                if q > lip_worst:
                    lip_worst, lip_wit = q, (p.copy(), res.witness)
            for j, xb in enumerate(probes):
                local = restrict_to_box(image, xb, loc * r)
                if local.is_empty:
                    continue
                res = sup_distance_over_set(local, nominal, norm, budget)
                q = 0.0 if res.value <= DISTANCE_TOL else res.value / dist
                if q > pr_worst[j]:
                    pr_worst[j], pr_wit[j] = q, (p.copy(), res.witness)
        lip_levels.append((r, lip_worst))
        lip_wits.append(lip_wit)
        for j in range(len(probes)):
            probe_levels[j].append((r, pr_worst[j]))
            probe_wits[j].append(pr_wit[j])

    semilocal = _finalize(lip_levels, lip_wits) if want_semilocal else None
    locals_ = [_finalize(tb, wt) for tb, wt in zip(probe_levels, probe_wits)]
    return semilocal, locals_


def estimate_lipusc(family, ybar, schedule=None, budget=SUP_BUDGET):
    """Estimate the Lipschitz upper-semicontinuity modulus at ``ybar``."""
    schedule = schedule or RadiusSchedule.default()
    semilocal, _ = _sweep(family, ybar, schedule, probes=None,
                          want_semilocal=True, budget=budget)
    return semilocal


def estimate_calmness(family, ybar, xbar, schedule=None, budget=SUP_BUDGET):
    """Estimate the calmness modulus at the graph point (ybar, xbar).

    The image supremum is restricted to the Chebyshev ball around ``xbar``
    of radius localization_radius_factor * (level radius).
    """
    schedule = schedule or RadiusSchedule.default()
    ybar = np.asarray(ybar, dtype=float).reshape(-1)
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    nominal = evaluate(family, ybar)
    if nominal.is_empty:
        raise PreconditionError("nominal image is empty: parameter not in the domain")
    d = geo.distance_to_set(xbar, nominal, family.norms.image_norm)
    if d > MEMBERSHIP_TOL * (1.0 + geo.vector_norm(xbar, "chebyshev")):
        raise PreconditionError(
            f"xbar is not in the nominal image (distance {d:.3g})"
        )
    _, locals_ = _sweep(family, ybar, schedule, probes=[xbar],
                        want_semilocal=False, budget=budget)
    return locals_[0]


def default_nominal_probes(family, ybar, schedule, interior_count=16):
    """Boundary/vertex points of the nominal image plus an interior sample.

    Open endpoints are pulled inside by a margin large enough that the
    localization balls of the last schedule levels stay clear of the
    boundary, so every returned point is a genuine member whose local
    estimate settles.
    """
    nominal = evaluate(family, np.asarray(ybar, dtype=float).reshape(-1))
    if nominal.is_empty:
        raise PreconditionError("nominal image is empty")
    box = geo.bounding_box(nominal)
    scale = 1.0
    if box is not None:
        widths = box[1] - box[0]
        finite = widths[np.isfinite(widths)]
        if finite.size:
            scale = max(1.0, float(np.max(finite)))
    r_tail = schedule.radii[-3] if len(schedule.radii) >= 3 else schedule.radii[-1]
    margin = max(1.25 * schedule.localization_radius_factor * r_tail,
                 1e-3 * scale)
    pts = [geo.extreme_points(nominal, interior_offset=margin)]
    rng = np.random.default_rng([int(schedule.seed) & 0xFFFFFFFF, 0x9E37])
    pts.append(geo.interior_points(nominal, interior_count, margin, rng))
    allpts = np.vstack([p for p in pts if p.size])
    seen, out = set(), []
    for p in allpts:
        key = tuple(np.round(p, 12))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _merge_estimates(estimates, probes):
    tables = [e.per_radius_worst for e in estimates]
    radii = [r for (r, _) in tables[0]]
    merged, wits = [], []
    for k, r in enumerate(radii):
        worst, wit = 0.0, None
        for e in estimates:
            w = e.per_radius_worst[k][1]
            if w > worst:
                worst, wit = w, e.per_radius_witness[k]
        merged.append((r, worst))
        wits.append(wit)
    values = [e.value for e in estimates]
    classes = [e.classification for e in estimates]
    if "infinite" in classes:
        classification = "infinite"
    elif "inconclusive" in classes:
        classification = "inconclusive"
    else:
        classification = "finite"
    value = max(values)
    j = int(np.argmax(values))
    return ModulusEstimate(
        per_radius_worst=tuple(merged),
        value=value,
        classification=classification,
        attaining_witness=estimates[j].attaining_witness,
        per_radius_witness=tuple(wits),
        per_probe=tuple((np.asarray(p, float), e) for p, e in zip(probes, estimates)),
    )


def sup_calmness_over_nominal(family, ybar, nominal_probe_points=None,
                              schedule=None, budget=SUP_BUDGET):
    """Supremum of the calmness estimates over probe points of the nominal
    image; the per-probe tables are retained in ``per_probe``.

    When no probe list is given the default probes are used: all
    boundary/vertex points plus a uniform interior sample.
    """
    schedule = schedule or RadiusSchedule.default()
    ybar = np.asarray(ybar, dtype=float).reshape(-1)
    if nominal_probe_points is None:
        nominal_probe_points = default_nominal_probes(family, ybar, schedule)
    probes = [np.asarray(p, dtype=float).reshape(-1) for p in nominal_probe_points]
    if not probes:
        raise PreconditionError("need at least one probe point")
    nominal = evaluate(family, ybar)
    norm = family.norms.image_norm
    for p in probes:
        d = geo.distance_to_set(p, nominal, norm)
        if d > MEMBERSHIP_TOL * (1.0 + geo.vector_norm(p, "chebyshev")):
            raise PreconditionError(
                f"probe point {p} is not in the nominal image (distance {d:.3g})"
            )
    _, locals_ = _sweep(family, ybar, schedule, probes=probes,
                        want_semilocal=False, budget=budget)
    return _merge_estimates(locals_, probes)


@dataclass
class EqualityReport:
    """Outcome of checking semilocal == sup of local moduli.

    ``verdict`` is one of "equal", "consistent_with_counterexample",
    "unexplained_gap", "inconclusive".  Failures are data, not errors: a
    mapping that violates the topological hypotheses is expected to break
    the equality.
    """

    lipusc: ModulusEstimate
    sup_calmness: ModulusEstimate
    hypotheses: object
    rel_tol: float
    inequality_satisfied: bool
    verdict: str


def verify_equality(family, ybar, schedule=None, rel_tol=0.05,
                    nominal_probe_points=None, budget=SUP_BUDGET):
    """Estimate both moduli, check the one-sided bound (semilocal >= sup of
    local always), and report the equality verdict.

    The hypothesis report decides whether an equality failure is the
    expected counterexample behavior or an unexplained gap.
    """
    from .hypotheses import hypothesis_report

    schedule = schedule or RadiusSchedule.default()
    ybar = np.asarray(ybar, dtype=float).reshape(-1)
    if nominal_probe_points is None:
        nominal_probe_points = default_nominal_probes(family, ybar, schedule)
    probes = [np.asarray(p, dtype=float).reshape(-1) for p in nominal_probe_points]
    semilocal, locals_ = _sweep(family, ybar, schedule, probes=probes,
                                want_semilocal=True, budget=budget)
    sup_clm = _merge_estimates(locals_, probes)
    hypo = hypothesis_report(family, ybar, schedule)

    lv, cv = semilocal.value, sup_clm.value
    if math.isinf(cv):
        inequality = math.isinf(lv)
    else:
        inequality = lv >= cv - rel_tol * max(1.0, cv)

    both_inf = math.isinf(lv) and math.isinf(cv)
    both_finite = math.isfinite(lv) and math.isfinite(cv)
    close = both_inf or (both_finite and abs(lv - cv) <= rel_tol * max(1.0, lv, cv))
    if close:
        verdict = "equal"
    elif not hypo.theorem_applicable:
        verdict = "consistent_with_counterexample"
    elif "inconclusive" in (semilocal.classification, sup_clm.classification):
        verdict = "inconclusive"
    else:
        verdict = "unexplained_gap"
    return EqualityReport(semilocal, sup_clm, hypo, rel_tol, inequality, verdict)
