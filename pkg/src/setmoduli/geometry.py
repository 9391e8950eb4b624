"""Set representations and exact/approximate point-to-set geometry.

Image sets of the mapping families are one of four computable
representations: a polyhedron ``{x : Ax <= b}``, a finite point set, a
one-dimensional union of intervals, or a sampled cloud tagged as an inner
approximation.  Distances follow the extended-real conventions: the
distance to the empty set is ``+inf`` (plain ``float('inf')``, which
already absorbs addition and max and compares totally).

All objects are immutable after construction (arrays are write-locked) and
safe to share across concurrent evaluators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ._backend import STATUS_INFEASIBLE, STATUS_OPTIMAL, qp_solve
from .errors import (
    DimensionMismatchError,
    SolverFailureError,
    UnboundedPolyhedronError,
    UnsupportedDimensionError,
)

INF = float("inf")

# Global tolerances: constraint satisfaction / emptiness, and point
# deduplication.  All fixtures are well-scaled, so these are absolute.
FEASIBILITY_TOL = 1e-9
DEDUP_TOL = 1e-7

VALID_NORMS = ("chebyshev", "euclidean")


@dataclass(frozen=True)
class NormSpec:
    """Norm pairing used consistently in every quotient of one experiment."""

    parameter_norm: str = "chebyshev"
    image_norm: str = "euclidean"

    def __post_init__(self):
        for name in (self.parameter_norm, self.image_norm):
            if name not in VALID_NORMS:
                raise ValueError(f"unknown norm {name!r}; expected one of {VALID_NORMS}")


def vector_norm(v, kind):
    v = np.asarray(v, dtype=float)
    if kind == "chebyshev":
        return float(np.max(np.abs(v))) if v.size else 0.0
    if kind == "euclidean":
        return float(np.linalg.norm(v))
    raise ValueError(f"unknown norm {kind!r}")


def _lock(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """One 1-D interval; endpoints may be +-inf, each side open or closed."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("a degenerate interval must be closed")

    @property
    def is_point(self):
        return self.lo == self.hi

    def contains(self, x, tol=0.0):
        if x < self.lo - tol or x > self.hi + tol:
            return False
        if tol == 0.0:
            if x == self.lo and not self.lo_closed:
                return False
            if x == self.hi and not self.hi_closed:
                return False
        return True


class IntervalUnion:
    """Finitely many pairwise disjoint, sorted 1-D intervals."""

    def __init__(self, intervals):
        parts = sorted(intervals, key=lambda iv: (iv.lo, iv.hi))
        for a, b in zip(parts, parts[1:]):
            if b.lo < a.hi or (b.lo == a.hi and a.hi_closed and b.lo_closed):
                raise ValueError(f"overlapping intervals {a} and {b}")
        self.intervals = tuple(parts)

    @classmethod
    def empty(cls):
        return cls(())

    @classmethod
    def closed(cls, lo, hi):
        return cls((Interval(lo, hi),))

    @classmethod
    def point(cls, x):
        return cls((Interval(x, x),))

    @classmethod
    def from_pairs(cls, pairs):
        return cls(tuple(Interval(lo, hi) for lo, hi in pairs))

    @property
    def ambient_dim(self):
        return 1

    @property
    def is_empty(self):
        return not self.intervals

    @property
    def is_closed(self):
        return all(
            (iv.lo_closed or iv.lo == -INF) and (iv.hi_closed or iv.hi == INF)
            for iv in self.intervals
        )

    def contains(self, x, tol=0.0):
        return any(iv.contains(x, tol) for iv in self.intervals)

    def __repr__(self):
        return f"IntervalUnion({list(self.intervals)!r})"


class FinitePointSet:
    """Finite list of points, deduplicated up to tolerance."""

    def __init__(self, points, dedup_tol=DEDUP_TOL):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.size == 0:
            pts = pts.reshape(0, pts.shape[1] if pts.ndim == 2 and pts.shape[1] else 1)
        kept = []
        for p in pts:
            if not any(np.max(np.abs(p - q)) <= dedup_tol for q in kept):
                kept.append(p)
        self.points = _lock(np.array(kept).reshape(len(kept), pts.shape[1]))

    @classmethod
    def empty(cls, dim=1):
        return cls(np.zeros((0, dim)))

    @property
    def ambient_dim(self):
        return self.points.shape[1]

    @property
    def is_empty(self):
        return self.points.shape[0] == 0

    @property
    def is_closed(self):
        return True

    def __repr__(self):
        return f"FinitePointSet({self.points.tolist()!r})"


class SampledCloud:
    """Finite sample known to lie inside an underlying set.

    Distances computed against a cloud are upper bounds on the true
    distance, and suprema over a cloud are lower bounds; consumers flag
    results accordingly.
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        self.points = _lock(pts)

    @property
    def ambient_dim(self):
        return self.points.shape[1]

    @property
    def is_empty(self):
        return self.points.shape[0] == 0

    @property
    def is_closed(self):
        return None  # unknown: the underlying set is only sampled

    def __repr__(self):
        return f"SampledCloud(<{self.points.shape[0]} points>)"


class Polyhedron:
    """``{x in R^n : Ax <= b}``; m = 0 rows means the whole space.

    Emptiness and boundedness are computed properties, never stored flags.
    """

    def __init__(self, A, b):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2:
            raise ValueError("A must be a 2-D matrix")
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatchError(
                f"A has {A.shape[0]} rows but b has {b.shape[0]} entries"
            )
        self.A = _lock(A)
        self.b = _lock(b)
        self._interval_cache = None
        self._empty_cache = None

    @classmethod
    def whole_space(cls, dim):
        return cls(np.zeros((0, dim)), np.zeros(0))

    @property
    def ambient_dim(self):
        return self.A.shape[1]

    @property
    def n_rows(self):
        return self.A.shape[0]

    @property
    def is_closed(self):
        return True

    def contains(self, x, tol=FEASIBILITY_TOL):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.ambient_dim:
            raise DimensionMismatchError(
                f"point has dim {x.shape[0]}, polyhedron has dim {self.ambient_dim}"
            )
        if self.n_rows == 0:
            return True
        scale = np.maximum(np.linalg.norm(self.A, axis=1), 1.0)
        return bool(np.all(self.A @ x - self.b <= tol * scale))

    @property
    def is_empty(self):
        if self._empty_cache is None:
            if self.ambient_dim == 1:
                self._empty_cache = self.to_interval_union().is_empty
            else:
                _, dist = project_onto_polyhedron(np.zeros(self.ambient_dim), self)
                self._empty_cache = dist == INF
        return self._empty_cache

    def to_interval_union(self):
        """Exact 1-D reduction to a single closed interval (or empty)."""
        if self.ambient_dim != 1:
            raise UnsupportedDimensionError("interval reduction needs ambient dim 1")
        if self._interval_cache is None:
            lo, hi = -INF, INF
            empty = False
            for a, beta in zip(self.A[:, 0], self.b):
                if a > 0.0:
                    hi = min(hi, beta / a)
                elif a < 0.0:
                    lo = max(lo, beta / a)
                elif beta < -FEASIBILITY_TOL:
                    empty = True
            if empty or lo > hi:
                self._interval_cache = IntervalUnion.empty()
            else:
                self._interval_cache = IntervalUnion((Interval(lo, hi),))
        return self._interval_cache

    def __repr__(self):
        return f"Polyhedron(m={self.n_rows}, n={self.ambient_dim})"


def ambient_dim(s):
    return s.ambient_dim


def is_empty_set(s):
    return s.is_empty


def is_closed_set(s):
    """True / False when decidable from the representation, None for clouds."""
    return s.is_closed


# ---------------------------------------------------------------------------
# Projection and distances
# ---------------------------------------------------------------------------


def project_onto_polyhedron(point, poly, feas_tol=FEASIBILITY_TOL):
    """Euclidean projection onto a polyhedron.

    Returns (projection, distance); for an empty polyhedron the projection
    is None and the distance +inf.
    """
    x = np.asarray(point, dtype=float).reshape(-1)
    if x.shape[0] != poly.ambient_dim:
        raise DimensionMismatchError(
            f"point dim {x.shape[0]} != polyhedron dim {poly.ambient_dim}"
        )
    if poly.n_rows == 0:
        return x.copy(), 0.0
    if poly.contains(x, feas_tol):
        return x.copy(), 0.0
    n = x.shape[0]
    status, z, active, lam, iters = qp_solve(np.eye(n), -x, poly.A, poly.b, feas_tol)
    if status == STATUS_INFEASIBLE:
        return None, INF
    if status != STATUS_OPTIMAL:
        raise SolverFailureError(
            f"projection active-set solve failed (status {status}, {iters} iterations)",
            best_iterate=z,
        )
    return z, float(np.linalg.norm(z - x))


def _chebyshev_distance_to_polyhedron(x, poly):
    # min t  s.t.  Az <= b,  |z - x|_inf <= t   (an LP in (z, t))
    from ._lp import solve_lp  # local import: geometry stays importable without scipy

    n = poly.ambient_dim
    eye = np.eye(n)
    A = np.block(
        [
            [poly.A, np.zeros((poly.n_rows, 1))],
            [eye, -np.ones((n, 1))],
            [-eye, -np.ones((n, 1))],
        ]
    )
    b = np.concatenate([poly.b, x, -x])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    status, value, _ = solve_lp(c, A, b)
    if status == "infeasible":
        return INF
    if status != "optimal":  # pragma: no cover - bounded below by 0
        raise SolverFailureError(f"chebyshev distance LP returned {status}")
    return max(value, 0.0)


def _distance_to_interval_union(x, iu):
    if iu.is_empty:
        return INF
    best = INF
    for iv in iu.intervals:
        if x < iv.lo:
            d = iv.lo - x
        elif x > iv.hi:
            d = x - iv.hi
        else:
            d = 0.0
        best = min(best, d)
    return best


def _distance_to_points(x, pts, norm):
    if pts.shape[0] == 0:
        return INF
    diff = pts - x[None, :]
    if norm == "chebyshev":
        d = np.max(np.abs(diff), axis=1)
    else:
        d = np.linalg.norm(diff, axis=1)
    return float(np.min(d))


def distance_to_set(point, s, norm="euclidean"):
    """Distance from a point to a set; +inf for the empty set.

    Exact for polyhedra (projection / LP), finite point sets and interval
    unions; an upper bound for sampled clouds.
    """
    if norm not in VALID_NORMS:
        raise ValueError(f"unknown norm {norm!r}")
    x = np.asarray(point, dtype=float).reshape(-1)
    if x.shape[0] != s.ambient_dim:
        raise DimensionMismatchError(
            f"point dim {x.shape[0]} != set dim {s.ambient_dim}"
        )
    if s.is_empty:
        return INF
    if isinstance(s, IntervalUnion):
        return _distance_to_interval_union(float(x[0]), s)
    if isinstance(s, (FinitePointSet, SampledCloud)):
        return _distance_to_points(x, s.points, norm)
    if isinstance(s, Polyhedron):
        if s.ambient_dim == 1:
            return _distance_to_interval_union(float(x[0]), s.to_interval_union())
        if norm == "euclidean":
            _, dist = project_onto_polyhedron(x, s)
            return dist
        return _chebyshev_distance_to_polyhedron(x, s)
    raise TypeError(f"unknown set representation {type(s).__name__}")


# ---------------------------------------------------------------------------
# Vertices and boundedness
# ---------------------------------------------------------------------------


def _recession_direction_2d(A):
    """A nonzero d with Ad <= 0 for a 2-D system, or None.

    Candidate directions suffice in the plane: every nontrivial recession
    cone contains either a rotated constraint normal or an anti-normal.
    """
    rows = [a for a in A if np.linalg.norm(a) > 0.0]
    if not rows:
        return np.array([1.0, 0.0])
    M = np.array(rows)
    scale = np.linalg.norm(M, axis=1)
    cands = []
    for a in M:
        r = np.array([-a[1], a[0]])
        cands.extend([r, -r, -a])
    for d in cands:
        nd = np.linalg.norm(d)
        if nd == 0.0:
            continue
        d = d / nd
        if np.all(M @ d <= 1e-12 * scale):
            return d
    return None


def polyhedron_is_bounded(poly):
    """Boundedness via recession analysis: bounded iff {d : Ad <= 0} = {0}."""
    n = poly.ambient_dim
    if n == 1:
        iu = poly.to_interval_union()
        if iu.is_empty:
            return True
        iv = iu.intervals[0]
        return iv.lo > -INF and iv.hi < INF
    rows = poly.A[np.linalg.norm(poly.A, axis=1) > 0.0]
    if rows.shape[0] == 0:
        return False
    if n == 2:
        return _recession_direction_2d(poly.A) is None
    from ._lp import solve_lp

    # max +-d_i over {Ad <= 0, |d|_inf <= 1}: any positive optimum is a
    # recession direction.
    box = np.vstack([np.eye(n), -np.eye(n)])
    A = np.vstack([rows, box])
    b = np.concatenate([np.zeros(rows.shape[0]), np.ones(2 * n)])
    for i in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sign
            status, value, _ = solve_lp(c, A, b)
            if status == "optimal" and -value > 1e-9:
                return False
    return True


def enumerate_vertices(poly, dedup_tol=DEDUP_TOL):
    """All vertices of a bounded polyhedron in dimension <= 4.

    Exhaustive n-subset basis enumeration: correct at desk scale, where
    m-choose-n stays small.
    """
    n = poly.ambient_dim
    if n > 4:
        raise UnsupportedDimensionError(
            f"vertex enumeration supports dimension <= 4, got {n}"
        )
    if not polyhedron_is_bounded(poly):
        raise UnboundedPolyhedronError("polyhedron has a recession direction")
    m = poly.n_rows
    rowscale = np.maximum(np.linalg.norm(poly.A, axis=1), 1.0) if m else np.ones(0)
    if n == 2 and m >= 2:
        return _vertices_2d(poly, rowscale, dedup_tol)
    verts = []
    for subset in itertools.combinations(range(m), n):
        As = poly.A[list(subset)]
        bs = poly.b[list(subset)]
        try:
            v = np.linalg.solve(As, bs)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(v)):
            continue
        if np.all(poly.A @ v - poly.b <= FEASIBILITY_TOL * rowscale + 1e-12):
            verts.append(v)
    return FinitePointSet(np.array(verts).reshape(len(verts), n), dedup_tol=dedup_tol)


def _vertices_2d(poly, rowscale, dedup_tol):
    """Closed-form basis enumeration in the plane: all row pairs at once."""
    A, b = poly.A, poly.b
    m = A.shape[0]
    ii, jj = np.triu_indices(m, k=1)
    a1, a2 = A[ii], A[jj]
    det = a1[:, 0] * a2[:, 1] - a1[:, 1] * a2[:, 0]
    keep = np.abs(det) > 1e-14 * rowscale[ii] * rowscale[jj]
    if not np.any(keep):
        return FinitePointSet(np.zeros((0, 2)), dedup_tol=dedup_tol)
    a1, a2, d = a1[keep], a2[keep], det[keep]
    b1, b2 = b[ii][keep], b[jj][keep]
    x = (b1 * a2[:, 1] - b2 * a1[:, 1]) / d
    y = (a1[:, 0] * b2 - a2[:, 0] * b1) / d
    pts = np.column_stack([x, y])
    feas = np.all(
        A @ pts.T - b[:, None] <= (FEASIBILITY_TOL * rowscale + 1e-12)[:, None],
        axis=0,
    )
    return FinitePointSet(pts[feas], dedup_tol=dedup_tol)


# ---------------------------------------------------------------------------
# Suprema of distance over a set
# ---------------------------------------------------------------------------


@dataclass
class SupDistance:
    """sup over the source of the distance to the target.

    ``exact`` is False when the value is only a certified lower bound, in
    which case ``flag`` says why (sampling, inner approximation, ...).
    """

    value: float
    witness: np.ndarray | None
    exact: bool = True
    flag: str | None = None


def _as_1d_pieces(s):
    """Sorted closed pieces (lo, hi) of a 1-D set; openness is immaterial
    to distances and suprema (the distance function is continuous)."""
    if isinstance(s, IntervalUnion):
        return [(iv.lo, iv.hi) for iv in s.intervals]
    if isinstance(s, (FinitePointSet, SampledCloud)):
        xs = sorted(float(p[0]) for p in s.points)
        return [(x, x) for x in xs]
    if isinstance(s, Polyhedron):
        return _as_1d_pieces(s.to_interval_union())
    raise TypeError(type(s).__name__)


def _target_breakpoints_1d(pieces):
    """Local maxima candidates of x -> d(x, target) on the line."""
    breaks = []
    for (lo, hi) in pieces:
        if np.isfinite(lo):
            breaks.append(lo)
        if np.isfinite(hi):
            breaks.append(hi)
    for (a, b) in zip(pieces, pieces[1:]):
        if np.isfinite(a[1]) and np.isfinite(b[0]):
            breaks.append(0.5 * (a[1] + b[0]))
    return breaks


def _sup_distance_1d(source, target, result_flags):
    src = _as_1d_pieces(source)
    tgt = _as_1d_pieces(target)
    if not tgt:
        return SupDistance(INF, None, exact=True, flag="empty-target")
    tgt_lo_unbounded = tgt[0][0] == -INF
    tgt_hi_unbounded = tgt[-1][1] == INF
    breaks = _target_breakpoints_1d(tgt)

    def d(x):
        best = INF
        for lo, hi in tgt:
            if x < lo:
                best = min(best, lo - x)
            elif x > hi:
                best = min(best, x - hi)
            else:
                return 0.0
        return best

    best, wit = -1.0, None
    for lo, hi in src:
        cands = []
        if lo == -INF:
            if not tgt_lo_unbounded:
                return SupDistance(INF, None, exact=True, flag="unbounded-source")
        else:
            cands.append(lo)
        if hi == INF:
            if not tgt_hi_unbounded:
                return SupDistance(INF, None, exact=True, flag="unbounded-source")
        else:
            cands.append(hi)
        cands.extend(x for x in breaks if lo < x < hi)
        for x in cands:
            dx = d(x)
            if dx > best:
                best, wit = dx, x
    if best < 0.0:  # source had no finite candidate (e.g. whole line source)
        best, wit = 0.0, None
    witness = None if wit is None else np.array([wit])
    return SupDistance(best, witness, exact=True, flag=result_flags or None)


def _reprs_equal(a, b):
    if a is b:
        return True
    if type(a) is not type(b):
        return False
    if isinstance(a, Polyhedron):
        return (
            a.A.shape == b.A.shape
            and np.array_equal(a.A, b.A)
            and np.array_equal(a.b, b.b)
        )
    if isinstance(a, (FinitePointSet, SampledCloud)):
        return a.points.shape == b.points.shape and np.array_equal(a.points, b.points)
    if isinstance(a, IntervalUnion):
        return a.intervals == b.intervals
    return False


def _is_convex_target(t):
    if isinstance(t, Polyhedron):
        return True
    if isinstance(t, IntervalUnion):
        return len(t.intervals) <= 1
    if isinstance(t, (FinitePointSet, SampledCloud)):
        return t.points.shape[0] <= 1
    return False


def sup_distance_over_set(source, target, norm="euclidean", budget=512):
    """sup over x in source of d(x, target).

    Exact for finite point sets and interval unions, and for bounded
    polyhedral sources with a convex target (the distance is convex, so the
    maximum sits on a vertex).  Falls back to boundary sampling, reported
    as a flagged lower bound, in dimension > 4 or against a non-convex
    target.  An empty source reports 0 (the supremum over the empty set is
    absorbed by the caller's 0/0 := 0 convention); an unbounded source
    reports +inf with an "unbounded-source" flag.
    """
    if source.ambient_dim != target.ambient_dim:
        raise DimensionMismatchError(
            f"source dim {source.ambient_dim} != target dim {target.ambient_dim}"
        )
    if source.is_empty:
        return SupDistance(0.0, None, exact=True, flag="empty-source")
    if _reprs_equal(source, target):
        return SupDistance(0.0, None, exact=True)
    if target.is_empty:
        return SupDistance(INF, None, exact=True, flag="empty-target")

    if source.ambient_dim == 1:
        flag = "inner-approximation" if isinstance(source, SampledCloud) else ""
        res = _sup_distance_1d(source, target, flag)
        if isinstance(source, SampledCloud) and res.flag == "inner-approximation":
            res.exact = False
        return res

    if isinstance(source, (FinitePointSet, SampledCloud)):
        best, wit = -1.0, None
        for p in source.points:
            dp = distance_to_set(p, target, norm)
            if dp > best:
                best, wit = dp, p
        exact = isinstance(source, FinitePointSet) and not isinstance(
            target, SampledCloud
        )
        flag = None
        if isinstance(source, SampledCloud):
            flag = "inner-approximation"
        elif isinstance(target, SampledCloud):
            flag = "cloud-target"
        return SupDistance(best, None if wit is None else wit.copy(), exact, flag)

    if isinstance(source, Polyhedron):
        if not polyhedron_is_bounded(source):
            return SupDistance(INF, None, exact=True, flag="unbounded-source")
        if source.ambient_dim <= 4:
            verts = enumerate_vertices(source)
            if verts.is_empty:
                return SupDistance(0.0, None, exact=True, flag="empty-source")
            if _is_convex_target(target):
                best, wit = -1.0, None
                for v in verts.points:
                    dv = distance_to_set(v, target, norm)
                    if dv > best:
                        best, wit = dv, v
                return SupDistance(best, wit.copy(), exact=True)
            # non-convex target: vertex maxima are not certified; sample
            pts = _sample_polyhedron(verts.points, budget)
        else:
            pts = None
        if pts is None:
            return SupDistance(0.0, None, exact=False, flag="unsupported-dimension")
        best, wit = -1.0, None
        for p in pts:
            dp = distance_to_set(p, target, norm)
            if dp > best:
                best, wit = dp, p
        return SupDistance(best, wit.copy(), exact=False, flag="sampled")

    raise TypeError(f"unknown set representation {type(source).__name__}")


def _sample_polyhedron(verts, budget):
    rng = np.random.default_rng(0)  # fixed stream: deterministic lower bound
    k = verts.shape[0]
    if k == 0:
        return None
    w = rng.dirichlet(np.ones(k), size=max(budget - k, 0))
    return np.vstack([verts, w @ verts]) if w.size else verts


# ---------------------------------------------------------------------------
# Bounding boxes, localization, probe helpers
# ---------------------------------------------------------------------------


def bounding_box(s):
    """Per-axis (lo, hi) arrays; infinite entries for unbounded sets,
    None for the empty set."""
    if s.is_empty:
        return None
    if isinstance(s, IntervalUnion):
        lo = min(iv.lo for iv in s.intervals)
        hi = max(iv.hi for iv in s.intervals)
        return np.array([lo]), np.array([hi])
    if isinstance(s, (FinitePointSet, SampledCloud)):
        return s.points.min(axis=0), s.points.max(axis=0)
    if isinstance(s, Polyhedron):
        if s.ambient_dim == 1:
            return bounding_box(s.to_interval_union())
        if polyhedron_is_bounded(s) and s.ambient_dim <= 4:
            verts = enumerate_vertices(s)
            if verts.is_empty:
                return None
            return verts.points.min(axis=0), verts.points.max(axis=0)
        n = s.ambient_dim
        return np.full(n, -INF), np.full(n, INF)
    raise TypeError(type(s).__name__)


def max_chebyshev_norm(s):
    """sup over x in s of |x|_inf; -inf for the empty set."""
    box = bounding_box(s)
    if box is None:
        return -INF
    lo, hi = box
    return float(np.max(np.maximum(np.abs(lo), np.abs(hi))))


def restrict_to_box(s, center, radius):
    """Intersect a set with the closed Chebyshev ball around ``center``."""
    center = np.asarray(center, dtype=float).reshape(-1)
    if center.shape[0] != s.ambient_dim:
        raise DimensionMismatchError("localization center dimension mismatch")
    if isinstance(s, IntervalUnion):
        lo_b, hi_b = center[0] - radius, center[0] + radius
        parts = []
        for iv in s.intervals:
            lo, hi = max(iv.lo, lo_b), min(iv.hi, hi_b)
            if lo > hi:
                continue
            parts.append(
                Interval(
                    lo,
                    hi,
                    iv.lo_closed if lo == iv.lo else True,
                    iv.hi_closed if hi == iv.hi else True,
                )
            )
        return IntervalUnion(parts)
    if isinstance(s, (FinitePointSet, SampledCloud)):
        if s.is_empty:
            return s
        mask = np.max(np.abs(s.points - center[None, :]), axis=1) <= radius
        cls = type(s)
        return cls(s.points[mask])
    if isinstance(s, Polyhedron):
        n = s.ambient_dim
        eye = np.eye(n)
        A = np.vstack([s.A, eye, -eye])
        b = np.concatenate([s.b, center + radius, radius - center])
        return Polyhedron(A, b)
    raise TypeError(type(s).__name__)


def extreme_points(s, interior_offset=0.0):
    """Endpoint / vertex / listed points of a set.

    Open interval endpoints are pulled inside by ``interior_offset`` so the
    returned points are genuine members.
    """
    if s.is_empty:
        return np.zeros((0, s.ambient_dim))
    if isinstance(s, IntervalUnion):
        pts = []
        for iv in s.intervals:
            length = iv.hi - iv.lo
            off = min(interior_offset, 0.25 * length) if np.isfinite(length) else interior_offset
            if np.isfinite(iv.lo):
                pts.append(iv.lo if iv.lo_closed else iv.lo + off)
            if np.isfinite(iv.hi) and not iv.is_point:
                pts.append(iv.hi if iv.hi_closed else iv.hi - off)
        return np.array(sorted(set(pts))).reshape(-1, 1)
    if isinstance(s, (FinitePointSet, SampledCloud)):
        return s.points.copy()
    if isinstance(s, Polyhedron):
        if s.ambient_dim == 1:
            return extreme_points(s.to_interval_union(), interior_offset)
        return enumerate_vertices(s).points.copy()
    raise TypeError(type(s).__name__)


def interior_points(s, count, margin, rng):
    """Deterministic-ish interior sample: grid for intervals, vertex mixes
    for polyhedra.  Points keep at least ``margin`` from the boundary where
    the geometry allows it."""
    if count <= 0 or s.is_empty:
        return np.zeros((0, s.ambient_dim))
    if isinstance(s, IntervalUnion):
        finite = [iv for iv in s.intervals if np.isfinite(iv.lo) and np.isfinite(iv.hi)]
        lengths = np.array([max(iv.hi - iv.lo, 0.0) for iv in finite])
        total = lengths.sum()
        pts = []
        for iv, length in zip(finite, lengths):
            if length <= 2 * margin:
                continue
            k = max(1, int(round(count * length / total))) if total > 0 else 1
            pts.extend(np.linspace(iv.lo + margin, iv.hi - margin, k).tolist())
        return np.array(sorted(pts)).reshape(-1, 1)
    if isinstance(s, (FinitePointSet, SampledCloud)):
        return np.zeros((0, s.ambient_dim))
    if isinstance(s, Polyhedron):
        if s.ambient_dim == 1:
            return interior_points(s.to_interval_union(), count, margin, rng)
        verts = enumerate_vertices(s).points
        if verts.shape[0] == 0:
            return np.zeros((0, s.ambient_dim))
        w = rng.dirichlet(np.ones(verts.shape[0]), size=count)
        return w @ verts
    raise TypeError(type(s).__name__)
