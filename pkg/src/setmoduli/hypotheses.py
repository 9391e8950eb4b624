"""Numerical verifiers for the topological premises of the moduli equality:
outer semicontinuity at the nominal parameter and local boundedness around
it.

Sampling can refute these properties or fail to refute them, never prove
them, so verdicts are pass (= not refuted at tolerance), fail (with a
reproducible witness), or inconclusive.  Non-closed nominal sets are
detected at the representation level (open interval endpoints): no finite
sample distinguishes a half-open interval from its closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import PreconditionError
from .estimation import GROWTH_FACTOR, GROWTH_STEP, GROWTH_WINDOW, classify_tail
from .families import evaluate, sample_parameters

INF = float("inf")

PREMISE_NOT_CLOSED = "nominal_not_closed"
PREMISE_OSC = "outer_semicontinuity"
PREMISE_BOUNDED = "local_boundedness"


@dataclass
class CheckResult:
    status: str  # "pass" | "fail" | "inconclusive"
    reason: str | None = None
    witness: tuple | None = None

    @property
    def passed(self):
        return self.status == "pass"


@dataclass
class HypothesisVerdict:
    osc: CheckResult
    locally_bounded: CheckResult

    @property
    def theorem_applicable(self):
        return self.osc.passed and self.locally_bounded.passed

    def violated_premises(self):
        out = []
        if self.osc.status == "fail":
            out.append(self.osc.reason or PREMISE_OSC)
        if self.locally_bounded.status == "fail":
            out.append(PREMISE_BOUNDED)
        return out


def _nonclosed_witnesses(s):
    """Boundary points at distance zero from the set but outside it."""
    if not isinstance(s, geo.IntervalUnion):
        return []
    pts = []
    for iv in s.intervals:
        if np.isfinite(iv.lo) and not iv.lo_closed:
            pts.append(iv.lo)
        if np.isfinite(iv.hi) and not iv.hi_closed:
            pts.append(iv.hi)
    return pts


def _representative_points(s, rng, cap=8):
    pts = geo.extreme_points(s, interior_offset=0.0)
    if isinstance(s, geo.Polyhedron) and s.ambient_dim > 1:
        extra = geo.interior_points(s, min(cap, 4), 0.0, rng)
        if extra.size:
            pts = np.vstack([pts, extra])
    return pts


def _osc_seed(schedule, level):
    return int(schedule.seed) * 1_000_003 + 0xA5A5 + level


def check_outer_semicontinuity(family, ybar, schedule, tol=1e-3):
    """Refute outer semicontinuity by finding a persistent cluster of image
    points that stays at distance > tol from the nominal set as the
    parameter radius shrinks.

    A representation-level check first flags nominal sets that are not
    closed; sampling alone cannot see that.
    """
    ybar = np.asarray(ybar, dtype=float).reshape(-1)
    nominal = evaluate(family, ybar)
    if nominal.is_empty:
        raise PreconditionError("nominal image is empty")

    if nominal.is_closed is False:
        w = _nonclosed_witnesses(nominal)
        witness = (ybar.copy(), np.array([w[0]])) if w else None
        return CheckResult("fail", PREMISE_NOT_CLOSED, witness)

    box = geo.bounding_box(nominal)
    if box is not None and np.all(np.isfinite(box[0])) and np.all(np.isfinite(box[1])):
        center = 0.5 * (box[0] + box[1])
        circum = float(np.max(box[1] - center)) if box[1].size else 0.0
        window = 10.0 * max(1.0, circum)
    else:
        center, window = None, None

    norm = family.norms.image_norm
    rng = np.random.default_rng([int(schedule.seed) & 0xFFFFFFFF, 0x05C1])
    far_per_level = []
    for k, r in enumerate(schedule.radii):
        params = sample_parameters(
            family, ybar, r, schedule.samples_per_radius + len(family.probe_directions),
            _osc_seed(schedule, k),
        )
        far = []
        for p in params:
            image = evaluate(family, p)
            if image.is_empty:
                continue
            if center is not None:
                # window first: also keeps unbounded perturbed polyhedra
                # representable by vertices
                image = geo.restrict_to_box(image, center, window)
                if image.is_empty:
                    continue
            elif isinstance(image, geo.Polyhedron) and not geo.polyhedron_is_bounded(image):
                continue
            for x in _representative_points(image, rng):
                if center is not None and np.max(np.abs(x - center)) > window + 1e-12:
                    continue
                d = geo.distance_to_set(x, nominal, norm)
                if d > tol:
                    far.append((p, x, d))
        far_per_level.append(far)

    depth = min(4, len(far_per_level))
    last = far_per_level[-1]
    if not last:
        return CheckResult("pass")
    cluster_eps = max(20.0 * tol, 1e-2)
    any_chain = False
    for (p, x, d) in last:
        # match the point backward through the shrinking-radius levels
        chain = []
        ok = True
        for lvl in far_per_level[-depth:]:
            near = [(x2, d2) for (_, x2, d2) in lvl
                    if np.max(np.abs(x - x2)) <= cluster_eps]
            if not near:
                ok = False
                break
            chain.append(max(d2 for _, d2 in near))
        if not ok:
            continue  # transient: not refuting
        any_chain = True
        # a genuine violation keeps its distance; continuous drift shrinks
        # with the radius and is evidence for, not against, the premise
        if chain[-1] >= 0.6 * chain[0]:
            return CheckResult("fail", PREMISE_OSC, (p.copy(), x.copy(), d))
    if any_chain:
        return CheckResult("pass")
    return CheckResult("inconclusive", "far points without a stable cluster")


def check_local_boundedness(family, ybar, schedule):
    """Track the largest image-point norm per radius level: pass when it
    stabilizes, fail when it keeps growing or an image is unbounded."""
    ybar = np.asarray(ybar, dtype=float).reshape(-1)
    nominal = evaluate(family, ybar)
    if nominal.is_empty:
        raise PreconditionError("nominal image is empty")

    maxima, witnesses = [], []
    for k, r in enumerate(schedule.radii):
        params = sample_parameters(
            family, ybar, r, schedule.samples_per_radius + len(family.probe_directions),
            _osc_seed(schedule, k) + 0x0B0B,
        )
        level_max, wit = geo.max_chebyshev_norm(nominal), (ybar.copy(), None)
        for p in params:
            image = evaluate(family, p)
            if image.is_empty:
                continue
            m = geo.max_chebyshev_norm(image)
            if m > level_max:
                level_max = m
                pts = geo.extreme_points(image, 0.0) if m < INF else None
                xw = None
                if pts is not None and len(pts):
                    xw = pts[int(np.argmax(np.max(np.abs(pts), axis=1)))]
                wit = (p.copy(), None if xw is None else np.asarray(xw, float))
        maxima.append(level_max)
        witnesses.append(wit)
        if math.isinf(level_max):
            return CheckResult("fail", PREMISE_BOUNDED, wit)

    cls = classify_tail(maxima, growth_factor=GROWTH_FACTOR,
                        growth_window=GROWTH_WINDOW, growth_step=GROWTH_STEP)
    if cls == "infinite":
        j = int(np.argmax(maxima))
        return CheckResult("fail", PREMISE_BOUNDED, witnesses[j])
    if cls == "finite":
        return CheckResult("pass")
    return CheckResult("inconclusive", "image norms neither stabilize nor grow")


def hypothesis_report(family, ybar, schedule):
    """Combine both checks; the equality theorem is applicable only when
    neither premise is refuted."""
    return HypothesisVerdict(
        osc=check_outer_semicontinuity(family, ybar, schedule),
        locally_bounded=check_local_boundedness(family, ybar, schedule),
    )
