"""Parametric set-valued mapping families and their evaluators.

Each family turns a flat parameter vector into the image set it defines.
Parameter packing is frozen per kind so scenario files stay portable:

* ``lp_feasible`` / ``lp_optimal_full``: the perturbable entries of A in
  row-major order, then the perturbable entries of b, then (optimal-set
  mapping only) the perturbable entries of c.  Which entries are
  perturbable is part of the family structure; fixed entries never enter
  the parameter vector.
* ``qp_optimal_canonical``: the full cost vector c, then the full
  right-hand side b ("canonical" perturbations keep Q and A fixed).
* ``qp_kkt_full``: A row-major, Q row-major, then b, then c.
* ``lcp``: M row-major, then q.
* ``sip_grid``: coefficients of the coefficient-function perturbation
  basis, then coefficients of the right-hand-side basis.  The parameter
  distance is the uniform norm of the perturbation functions on the index
  grid, not a coefficient norm.
* ``sublevel_1d``: the level (alpha,).
* counterexamples: the scalar parameter (y,).

Families are immutable; ``evaluate`` is pure and reentrant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from ._backend import STATUS_INFEASIBLE, STATUS_OPTIMAL, qp_solve
from .errors import (
    DegenerateLevelSetError,
    PreconditionError,
    SolverFailureError,
    UnsupportedSizeError,
)
from .geometry import (
    FinitePointSet,
    Interval,
    IntervalUnion,
    NormSpec,
    Polyhedron,
    SampledCloud,
)

LCP_MAX_DIM = 12

FAMILY_KINDS = (
    "lp_feasible",
    "lp_optimal_full",
    "qp_optimal_canonical",
    "qp_kkt_full",
    "lcp",
    "sip_grid",
    "sublevel_1d",
    "counterexample_sqrt",
    "counterexample_jump",
    "counterexample_escape",
)


class MappingFamily:
    """A named parametric set-valued mapping with its norms and probes.

    ``probe_directions`` are unit-norm packed directions (under the
    family's parameter norm) that the sampling estimators always include;
    fixtures register their analytic worst-case directions here.
    """

    def __init__(self, kind, structure, parameter_dim, image_dim, norms=None,
                 probe_directions=(), name=None):
        self.kind = kind
        self.structure = structure
        self.parameter_dim = int(parameter_dim)
        self.image_dim = int(image_dim)
        self.norms = norms if norms is not None else NormSpec()
        probes = []
        for d in probe_directions:
            d = np.asarray(d, dtype=float).reshape(-1)
            if d.shape[0] != self.parameter_dim:
                raise PreconditionError("probe direction has wrong length")
            nd = self.direction_norm(d)
            if nd <= 0.0:
                raise PreconditionError("probe direction must be nonzero")
            probes.append(geo._lock(d / nd))
        self.probe_directions = tuple(probes)
        self.name = name or kind

    def direction_norm(self, d):
        d = np.asarray(d, dtype=float).reshape(-1)
        if self.kind == "sip_grid":
            s = self.structure
            na = float(np.max(np.abs(s.a_basis.T @ d[: s.a_basis.shape[0]])))
            nb = float(np.max(np.abs(s.b_basis.T @ d[s.a_basis.shape[0]:])))
            return max(na, nb)
        return geo.vector_norm(d, self.norms.parameter_norm)

    def parameter_distance(self, p, q):
        p = np.asarray(p, dtype=float).reshape(-1)
        q = np.asarray(q, dtype=float).reshape(-1)
        return self.direction_norm(p - q)

    def with_probes(self, extra_directions):
        return MappingFamily(
            self.kind, self.structure, self.parameter_dim, self.image_dim,
            self.norms, tuple(self.probe_directions) + tuple(extra_directions),
            self.name,
        )

    def __repr__(self):
        return f"MappingFamily({self.name!r}, dim {self.parameter_dim} -> {self.image_dim})"


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LpStructure:
    A0: np.ndarray          # m x n template
    b0: np.ndarray
    c0: np.ndarray | None   # None for feasible-set mappings
    mask_A: np.ndarray      # boolean, entries that live in the parameter
    mask_b: np.ndarray
    mask_c: np.ndarray | None


@dataclass(frozen=True, eq=False)
class QpCanonicalStructure:
    Q: np.ndarray
    A: np.ndarray


@dataclass(frozen=True, eq=False)
class QpKktStructure:
    n: int
    m: int


@dataclass(frozen=True, eq=False)
class LcpStructure:
    n: int


@dataclass(frozen=True, eq=False)
class SipStructure:
    t_grid: np.ndarray      # index grid in [-1, 1]
    a_nominal: np.ndarray   # coefficient function on the grid
    b_nominal: np.ndarray
    a_basis: np.ndarray     # (k_a, N) perturbation basis for a
    b_basis: np.ndarray     # (k_b, N) perturbation basis for b


@dataclass(frozen=True, eq=False)
class SublevelStructure:
    f: object               # callable, vectorized over numpy arrays
    fprime: object
    domain: tuple
    grid_points: int
    f_token: object = None  # serializable description, if any


@dataclass(frozen=True, eq=False)
class CustomStructure:
    """Test scaffolding: an arbitrary evaluator.  Not scenario-loadable."""

    evaluator: object


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _full_mask(shape):
    return np.ones(shape, dtype=bool)


def lp_feasible_family(A0, b0, mask_A=None, mask_b=None, norms=None,
                       probe_directions=(), name=None):
    A0 = np.asarray(A0, dtype=float)
    b0 = np.asarray(b0, dtype=float).reshape(-1)
    mask_A = _full_mask(A0.shape) if mask_A is None else np.asarray(mask_A, bool)
    mask_b = _full_mask(b0.shape) if mask_b is None else np.asarray(mask_b, bool)
    dim = int(mask_A.sum() + mask_b.sum())
    st = LpStructure(geo._lock(A0), geo._lock(b0), None, mask_A, mask_b, None)
    return MappingFamily("lp_feasible", st, dim, A0.shape[1], norms,
                         probe_directions, name or "lp_feasible")


def lp_optimal_family(A0, b0, c0, mask_A=None, mask_b=None, mask_c=None,
                      norms=None, probe_directions=(), name=None):
    A0 = np.asarray(A0, dtype=float)
    b0 = np.asarray(b0, dtype=float).reshape(-1)
    c0 = np.asarray(c0, dtype=float).reshape(-1)
    mask_A = _full_mask(A0.shape) if mask_A is None else np.asarray(mask_A, bool)
    mask_b = _full_mask(b0.shape) if mask_b is None else np.asarray(mask_b, bool)
    mask_c = _full_mask(c0.shape) if mask_c is None else np.asarray(mask_c, bool)
    dim = int(mask_A.sum() + mask_b.sum() + mask_c.sum())
    st = LpStructure(geo._lock(A0), geo._lock(b0), geo._lock(c0), mask_A, mask_b, mask_c)
    return MappingFamily("lp_optimal_full", st, dim, A0.shape[1], norms,
                         probe_directions, name or "lp_optimal_full")


def qp_canonical_family(Q, A, norms=None, probe_directions=(), name=None):
    Q = np.asarray(Q, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, Q.shape[0])
    st = QpCanonicalStructure(geo._lock(Q), geo._lock(A))
    dim = Q.shape[0] + A.shape[0]
    return MappingFamily("qp_optimal_canonical", st, dim, Q.shape[0], norms,
                         probe_directions, name or "qp_optimal_canonical")


def qp_kkt_family(n, m, norms=None, probe_directions=(), name=None):
    st = QpKktStructure(int(n), int(m))
    dim = m * n + n * n + m + n
    return MappingFamily("qp_kkt_full", st, dim, n + m, norms,
                         probe_directions, name or "qp_kkt_full")


def lcp_family(n, norms=None, probe_directions=(), name=None):
    st = LcpStructure(int(n))
    return MappingFamily("lcp", st, n * n + n, n, norms, probe_directions,
                         name or "lcp")


def sip_family(grid_points=201, norms=None, probe_directions=None, name=None):
    """The semi-infinite fixture: constraints a_t x <= b_t over t in [-1, 1]
    with nominal a_t = t, b_t = 1, discretized on a uniform grid.

    Perturbations live in the finite subspace spanned by {1, t, |t|} for a
    and {1, t} for b, which contains the worst-case probe directions; the
    estimators therefore produce certified lower bounds that attain the
    analytic value.
    """
    t = np.linspace(-1.0, 1.0, int(grid_points))
    a_basis = np.vstack([np.ones_like(t), t, np.abs(t)])
    b_basis = np.vstack([np.ones_like(t), t])
    st = SipStructure(geo._lock(t), geo._lock(t.copy()), geo._lock(np.ones_like(t)),
                      geo._lock(a_basis), geo._lock(b_basis))
    if probe_directions is None:
        # packed (u1, u2, u3, v1, v2): delta_a = u1 + u2 t + u3|t|,
        # delta_b = v1 + v2 t.  Signed |t|-tilts of a with b shifts drive
        # the boundary points of the feasible interval hardest.
        probe_directions = (
            np.array([0.0, 0.0, 1.0, -1.0, 0.0]),
            np.array([0.0, 0.0, -1.0, -1.0, 0.0]),
            np.array([0.0, 0.0, -1.0, 1.0, 0.0]),
            np.array([0.0, 0.0, 1.0, 1.0, 0.0]),
        )
    return MappingFamily("sip_grid", st, 5, 1, norms, probe_directions,
                         name or "sip_grid")


_NAMED_FUNCTIONS = {
    "sin": (np.sin, np.cos),
    "square": (lambda x: np.square(x), lambda x: 2.0 * x),
}


def _poly_pair(coeffs):
    c = np.asarray(coeffs, dtype=float)
    dc = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
    return (
        lambda x: np.polynomial.polynomial.polyval(x, c),
        lambda x: np.polynomial.polynomial.polyval(x, dc),
    )


def resolve_function(token):
    """Map a serializable token ("sin", {"poly": [...]}) to (f, f')."""
    if isinstance(token, str):
        if token not in _NAMED_FUNCTIONS:
            raise PreconditionError(f"unknown function name {token!r}")
        return _NAMED_FUNCTIONS[token]
    if isinstance(token, dict) and "poly" in token:
        return _poly_pair(token["poly"])
    raise PreconditionError(f"cannot resolve function token {token!r}")


def sublevel_family(f=None, fprime=None, domain=(-2 * math.pi, 2 * math.pi),
                    grid_points=2001, f_token=None, norms=None,
                    probe_directions=(np.array([1.0]), np.array([-1.0])),
                    name=None):
    if f is None:
        f, fprime = resolve_function(f_token)
    st = SublevelStructure(f, fprime, (float(domain[0]), float(domain[1])),
                           int(grid_points), f_token)
    return MappingFamily("sublevel_1d", st, 1, 1, norms, probe_directions,
                         name or "sublevel_1d")


def counterexample_family(kind, norms=None, name=None):
    if kind not in ("counterexample_sqrt", "counterexample_jump", "counterexample_escape"):
        raise PreconditionError(f"not a counterexample kind: {kind}")
    probes = (np.array([1.0]), np.array([-1.0]))
    return MappingFamily(kind, None, 1, 1, norms, probes, name or kind)


def custom_family(evaluator, parameter_dim, image_dim, norms=None,
                  probe_directions=(), name="custom"):
    """Wrap an arbitrary evaluator (test scaffolding; not scenario-loadable)."""
    return MappingFamily("custom", CustomStructure(evaluator), parameter_dim,
                         image_dim, norms, probe_directions, name)


# Canonical fixture instances -------------------------------------------------


def example_lp_optimal():
    """min c x  s.t.  a x <= b, -x <= 0 with perturbable (a, b, c), nominal
    (1, 1, -1); the second constraint row is structural."""
    A0 = np.array([[1.0], [-1.0]])
    b0 = np.array([1.0, 0.0])
    c0 = np.array([-1.0])
    mask_A = np.array([[True], [False]])
    mask_b = np.array([True, False])
    probes = (np.array([-1.0, 1.0, 0.0]), np.array([1.0, -1.0, 0.0]))
    return lp_optimal_family(A0, b0, c0, mask_A, mask_b, None,
                             norms=NormSpec("chebyshev", "euclidean"),
                             probe_directions=probes, name="lp_optimal_example")


def example_lp_nominal_parameter():
    return np.array([1.0, 1.0, -1.0])


def example_lcp():
    probes = (np.array([1.0, 1.0]), np.array([-1.0, -1.0]))
    return lcp_family(1, norms=NormSpec("chebyshev", "euclidean"),
                      probe_directions=probes, name="lcp_example")


def example_lcp_nominal_parameter():
    return np.array([-1.0, 1.0])


def example_sip(grid_points=201):
    return sip_family(grid_points, norms=NormSpec("chebyshev", "euclidean"),
                      name="sip_example")


def example_sublevel(grid_points=2001):
    return sublevel_family(np.sin, np.cos, (-2 * math.pi, 2 * math.pi),
                           grid_points, f_token="sin",
                           norms=NormSpec("chebyshev", "euclidean"),
                           name="sublevel_sin_example")


# ---------------------------------------------------------------------------
# Packing / unpacking
# ---------------------------------------------------------------------------


def _lp_unpack(st, param):
    A = np.array(st.A0)
    b = np.array(st.b0)
    k = int(st.mask_A.sum())
    A[st.mask_A] = param[:k]
    j = k + int(st.mask_b.sum())
    b[st.mask_b] = param[k:j]
    if st.c0 is None:
        return A, b, None
    c = np.array(st.c0)
    c[st.mask_c] = param[j:]
    return A, b, c


def lp_pack(family, A, b, c=None):
    """Inverse of the documented packing, for building parameters in tests."""
    st = family.structure
    parts = [np.asarray(A, float)[st.mask_A], np.asarray(b, float)[st.mask_b]]
    if st.c0 is not None:
        parts.append(np.asarray(c, float)[st.mask_c])
    return np.concatenate(parts)


def _kkt_unpack(st, param):
    n, m = st.n, st.m
    i = 0
    A = param[i:i + m * n].reshape(m, n); i += m * n
    Q = param[i:i + n * n].reshape(n, n); i += n * n
    b = param[i:i + m]; i += m
    c = param[i:i + n]
    return A, Q, b, c


def kkt_pack(A, Q, b, c):
    return np.concatenate([np.ravel(A), np.ravel(Q), np.ravel(b), np.ravel(c)])


def lcp_pack(M, q):
    return np.concatenate([np.ravel(M), np.ravel(q)])


# ---------------------------------------------------------------------------
# Core solvers used by the evaluators
# ---------------------------------------------------------------------------


def _eval_lp_optimal_1d(A, b, c):
    iu = Polyhedron(A, b).to_interval_union()
    if iu.is_empty:
        return IntervalUnion.empty()
    iv = iu.intervals[0]
    cval = float(c[0])
    if cval > 0.0:
        if iv.lo == -geo.INF:
            return IntervalUnion.empty()
        return IntervalUnion.point(iv.lo)
    if cval < 0.0:
        if iv.hi == geo.INF:
            return IntervalUnion.empty()
        return IntervalUnion.point(iv.hi)
    return iu


def solve_lp_optimal_face(A, b, c, face_tol=1e-9):
    """Optimal face of min c'x s.t. Ax <= b as a polyhedron; empty when the
    program is infeasible or unbounded."""
    n = A.shape[1]
    if n == 1:
        return _eval_lp_optimal_1d(A, b, c)
    from ._lp import solve_lp

    status, value, _ = solve_lp(c, A, b)
    if status != "optimal":
        return FinitePointSet.empty(n)
    pad = face_tol * (1.0 + abs(value))
    A_face = np.vstack([A, c.reshape(1, -1), -c.reshape(1, -1)])
    b_face = np.concatenate([b, [value + pad], [-value + pad]])
    return Polyhedron(A_face, b_face)


def solve_qp_optimal_set(Q, A, c, b):
    """Optimal set of the convex QP min .5 x'Qx + c'x s.t. Ax <= b.

    Positive definite Q: the unique minimizer through the active-set
    kernel.  Merely positive semidefinite Q: complementarity enumeration
    finds a KKT point, and the optimal set is returned as the face
    {Ax <= b, Qx = Qx*, (c + Qx*)'x = (c + Qx*)'x*}.
    """
    n = Q.shape[0]
    eigs = np.linalg.eigvalsh(0.5 * (Q + Q.T))
    if eigs[0] < -1e-9 * max(1.0, abs(eigs[-1])):
        raise PreconditionError("Q must be positive semidefinite")
    if eigs[0] > 1e-10 * max(1.0, abs(eigs[-1])):
        status, x, active, lam, iters = qp_solve(Q, c, A if A.size else None,
                                                 b if A.size else None)
        if status == STATUS_INFEASIBLE:
            return FinitePointSet.empty(n)
        if status != STATUS_OPTIMAL:
            raise SolverFailureError(
                f"QP active-set solve failed (status {status})", best_iterate=x)
        return FinitePointSet([x])
    x_star = _psd_qp_kkt_point(Q, A, c, b)
    if x_star is None:
        return FinitePointSet.empty(n)
    g = c + Q @ x_star
    A_face = np.vstack([A, Q, -Q, g.reshape(1, -1), -g.reshape(1, -1)])
    qx = Q @ x_star
    gv = float(g @ x_star)
    pad = 1e-9
    b_face = np.concatenate([b, qx + pad, -qx + pad, [gv + pad], [-gv + pad]])
    return Polyhedron(A_face, b_face)


def _psd_qp_kkt_point(Q, A, c, b, tol=1e-9):
    m = A.shape[0]
    if m > LCP_MAX_DIM:
        raise UnsupportedSizeError(f"psd QP enumeration supports m <= {LCP_MAX_DIM}")
    best = None
    best_val = np.inf
    n = Q.shape[0]
    for r in range(m + 1):
        for W in itertools.combinations(range(m), r):
            W = list(W)
            K = np.zeros((n + r, n + r))
            K[:n, :n] = Q
            if r:
                K[:n, n:] = A[W].T
                K[n:, :n] = A[W]
            rhs = np.concatenate([-c, b[W]])
            try:
                sol, res, rank, _ = np.linalg.lstsq(K, rhs, rcond=None)
            except np.linalg.LinAlgError:
                continue
            if np.linalg.norm(K @ sol - rhs) > tol * (1.0 + np.linalg.norm(rhs)):
                continue
            x = sol[:n]
            lam = sol[n:]
            if np.any(lam < -1e-8):
                continue
            if m and np.any(A @ x - b > 1e-8 * np.maximum(1.0, np.abs(b))):
                continue
            val = 0.5 * x @ Q @ x + c @ x
            if val < best_val - 1e-12:
                best_val, best = val, x
    return best


def solve_lcp_enumerate(M, q, tol=1e-9):
    """All solutions of x >= 0, Mx + q >= 0, x'(Mx + q) = 0 by enumerating
    the 2^n complementary index sets.

    Nonsingular complementary subsystems contribute isolated points.  A
    singular but consistent subsystem contributes an affine solution piece;
    in one dimension those pieces are returned exactly as intervals, in
    higher dimensions their extreme points are returned as a sampled cloud
    (an inner approximation).
    """
    M = np.asarray(M, dtype=float)
    q = np.asarray(q, dtype=float).reshape(-1)
    n = q.shape[0]
    if M.shape != (n, n):
        raise PreconditionError(f"M must be {n}x{n}")
    if n > LCP_MAX_DIM:
        raise UnsupportedSizeError(f"LCP enumeration supports n <= {LCP_MAX_DIM}")

    points = []
    segments_1d = []
    inexact = False
    for r in range(n + 1):
        for B in itertools.combinations(range(n), r):
            B = list(B)
            x = np.zeros(n)
            if r == 0:
                w = q
                if np.all(w >= -tol):
                    points.append(x)
                continue
            Mbb = M[np.ix_(B, B)]
            rhs = -q[B]
            sing = abs(np.linalg.det(Mbb)) < 1e-12 * max(
                1.0, float(np.max(np.abs(Mbb))) ** r
            )
            if not sing:
                xb = np.linalg.solve(Mbb, rhs)
                x[B] = xb
                w = M @ x + q
                if np.all(x >= -tol) and np.all(w >= -tol):
                    points.append(np.maximum(x, 0.0))
                continue
            # singular subsystem: affine solution piece (if consistent)
            xb0, _, rank, _ = np.linalg.lstsq(Mbb, rhs, rcond=None)
            if np.linalg.norm(Mbb @ xb0 - rhs) > tol * (1.0 + np.linalg.norm(rhs)):
                continue
            if n == 1:
                # piece = {x >= 0 : q + Mx >= 0 holds, M x = -q}; here M = 0
                # and q = 0, so every x >= 0 solves it
                segments_1d.append(Interval(0.0, geo.INF))
                continue
            _, s, Vt = np.linalg.svd(Mbb)
            null = Vt[rank:].T
            x[B] = xb0
            if np.all(x >= -tol) and np.all(M @ x + q >= -tol):
                points.append(np.maximum(x, 0.0))
            for dcol in null.T:
                for sign in (1.0, -1.0):
                    xt = np.array(x)
                    xt[B] = xb0 + sign * dcol
                    if np.all(xt >= -tol) and np.all(M @ xt + q >= -tol):
                        points.append(np.maximum(xt, 0.0))
                        inexact = True

    if n == 1 and segments_1d:
        pieces = list(segments_1d)
        for p in points:
            val = float(p[0])
            if not any(iv.contains(val, tol) for iv in pieces):
                pieces.append(Interval(val, val))
        return IntervalUnion(pieces)
    if inexact:
        return SampledCloud(np.array(points).reshape(len(points), n))
    return FinitePointSet(np.array(points).reshape(len(points), n))


def isolate_level_crossings(f, level, domain, grid_points, refine_tol=1e-12,
                            value_tol=1e-12, dip_tol=1e-9):
    """Roots of f(x) = level on [lo, hi]: sign-change bisection on a uniform
    grid, refined by bisection; endpoint values within ``value_tol`` of the
    level count as roots.  A dip of |f - level| below ``dip_tol`` without a
    sign change is a tangency we cannot certify and raises."""
    lo, hi = float(domain[0]), float(domain[1])
    xs = np.linspace(lo, hi, int(grid_points))
    vals = np.asarray(f(xs), dtype=float) - level
    scale = max(1.0, float(np.max(np.abs(vals))))
    pitch = (hi - lo) / (int(grid_points) - 1)
    # a quadratic tangency sampled at pitch h leaves a residual ~ h^2/8, so
    # the dip threshold must sit above that to be detectable
    dip_tol = max(dip_tol, 4.0 * pitch * pitch)
    roots = []
    if abs(vals[0]) <= value_tol * scale:
        roots.append(lo)
    if abs(vals[-1]) <= value_tol * scale:
        roots.append(hi)

    for i in range(len(xs) - 1):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if abs(fa) <= value_tol * scale or abs(fb) <= value_tol * scale:
            continue  # endpoint roots collected via the grid nodes below
        if fa * fb < 0.0:
            while b - a > refine_tol:
                m = 0.5 * (a + b)
                fm = float(f(m)) - level
                if fm == 0.0:
                    a = b = m
                    break
                if fa * fm < 0.0:
                    b, fb = m, fm
                else:
                    a, fa = m, fm
            roots.append(0.5 * (a + b))

    # grid nodes sitting exactly on the level
    for i in range(1, len(xs) - 1):
        if abs(vals[i]) <= value_tol * scale:
            if vals[i - 1] * vals[i + 1] < 0.0:
                roots.append(xs[i])  # crossing through the node
            else:
                # touch without a certified sign change: at grid resolution
                # this is indistinguishable from a barely-split piece
                raise DegenerateLevelSetError(
                    f"level touched without a sign change at x = {xs[i]}"
                )

    # tangency scan: interior dips toward the level with no sign change
    for i in range(1, len(xs) - 1):
        if (
            dip_tol * scale > abs(vals[i]) > value_tol * scale
            and abs(vals[i]) < abs(vals[i - 1])
            and abs(vals[i]) < abs(vals[i + 1])
            and vals[i - 1] * vals[i + 1] > 0.0
        ):
            raise DegenerateLevelSetError(
                f"possible tangency of the level set near x = {xs[i]}"
            )

    roots = sorted(set(round(r, 14) for r in roots))
    merged = []
    for r in roots:
        if not merged or r - merged[-1] > 1e-10:
            merged.append(r)
    return merged


def sublevel_interval_union(f, level, domain, grid_points):
    """The 1-D sub-level set {x in domain : f(x) <= level} as intervals.

    Segments between consecutive crossings are classified by a midpoint
    sign; crossings isolated from every kept segment become degenerate
    single-point pieces."""
    lo, hi = float(domain[0]), float(domain[1])
    roots = isolate_level_crossings(f, level, domain, grid_points)
    breaks = sorted(set([lo, hi] + roots))
    pieces = []
    for a, b in zip(breaks, breaks[1:]):
        mid = 0.5 * (a + b)
        if float(f(mid)) <= level:
            if pieces and pieces[-1][1] == a:
                pieces[-1] = (pieces[-1][0], b)
            else:
                pieces.append((a, b))
    intervals = [Interval(a, b) for a, b in pieces]
    for r in roots:
        if not any(iv.contains(r, 1e-12) for iv in intervals):
            intervals.append(Interval(r, r))
    return IntervalUnion(intervals)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _eval_lp_feasible(family, param):
    A, b, _ = _lp_unpack(family.structure, param)
    return Polyhedron(A, b)


def _eval_lp_optimal(family, param):
    A, b, c = _lp_unpack(family.structure, param)
    return solve_lp_optimal_face(A, b, c)


def _eval_qp_canonical(family, param):
    st = family.structure
    n = st.Q.shape[0]
    c = param[:n]
    b = param[n:]
    return solve_qp_optimal_set(np.array(st.Q), np.array(st.A), np.array(c),
                                np.array(b))


def _eval_qp_kkt(family, param):
    A, Q, b, c = _kkt_unpack(family.structure, param)
    n, m = family.structure.n, family.structure.m
    if m > LCP_MAX_DIM:
        raise UnsupportedSizeError(f"KKT enumeration supports m <= {LCP_MAX_DIM}")
    pairs = []
    inexact = False
    for r in range(m + 1):
        for W in itertools.combinations(range(m), r):
            W = list(W)
            K = np.zeros((n + r, n + r))
            K[:n, :n] = Q
            if r:
                K[:n, n:] = A[W].T
                K[n:, :n] = A[W]
            rhs = np.concatenate([-c, b[W]])
            det_ok = True
            try:
                sol = np.linalg.solve(K, rhs)
                if not np.all(np.isfinite(sol)):
                    det_ok = False
            except np.linalg.LinAlgError:
                det_ok = False
            if not det_ok:
                sol, _, rank, _ = np.linalg.lstsq(K, rhs, rcond=None)
                if np.linalg.norm(K @ sol - rhs) > 1e-9 * (1.0 + np.linalg.norm(rhs)):
                    continue
                inexact = inexact or rank < n + r
            x = sol[:n]
            y = np.zeros(m)
            y[W] = sol[n:]
            if np.any(y < -1e-9):
                continue
            if m and np.any(A @ x - b > 1e-9 * np.maximum(1.0, np.abs(b))):
                continue
            pairs.append(np.concatenate([x, np.maximum(y, 0.0)]))
    pts = np.array(pairs).reshape(len(pairs), n + m)
    return SampledCloud(pts) if inexact else FinitePointSet(pts)


def _eval_lcp(family, param):
    n = family.structure.n
    M = param[: n * n].reshape(n, n)
    q = param[n * n:]
    return solve_lcp_enumerate(M, q)


def _eval_sip(family, param):
    st = family.structure
    ka = st.a_basis.shape[0]
    a = st.a_nominal + st.a_basis.T @ param[:ka]
    b = st.b_nominal + st.b_basis.T @ param[ka:]
    return Polyhedron(a.reshape(-1, 1), b)


def _eval_sublevel(family, param):
    st = family.structure
    return sublevel_interval_union(st.f, float(param[0]), st.domain, st.grid_points)


def _eval_counterexample_sqrt(family, param):
    y = float(param[0])
    base = Interval(-1.0, 0.0, lo_closed=False, hi_closed=False)
    if y <= 0.0:
        return IntervalUnion((base,))
    return IntervalUnion((base, Interval(0.0, math.sqrt(y), lo_closed=False,
                                         hi_closed=False)))


def _eval_counterexample_jump(family, param):
    y = float(param[0])
    if y == 0.0:
        return FinitePointSet([[0.0]])
    return FinitePointSet([[0.0], [1.0]])


def _eval_counterexample_escape(family, param):
    y = float(param[0])
    if y == 0.0:
        return FinitePointSet([[0.0]])
    return FinitePointSet([[0.0], [1.0 / y]])


_EVALUATORS = {
    "lp_feasible": _eval_lp_feasible,
    "lp_optimal_full": _eval_lp_optimal,
    "qp_optimal_canonical": _eval_qp_canonical,
    "qp_kkt_full": _eval_qp_kkt,
    "lcp": _eval_lcp,
    "sip_grid": _eval_sip,
    "sublevel_1d": _eval_sublevel,
    "counterexample_sqrt": _eval_counterexample_sqrt,
    "counterexample_jump": _eval_counterexample_jump,
    "counterexample_escape": _eval_counterexample_escape,
}


def evaluate(family, param):
    """Image set of the family at a parameter, as the exact representation
    the family admits."""
    param = np.asarray(param, dtype=float).reshape(-1)
    if param.shape[0] != family.parameter_dim:
        raise PreconditionError(
            f"parameter has length {param.shape[0]}, family expects "
            f"{family.parameter_dim}"
        )
    if family.kind == "custom":
        return family.structure.evaluator(param)
    try:
        fn = _EVALUATORS[family.kind]
    except KeyError:
        raise PreconditionError(f"unknown family kind {family.kind!r}") from None
    return fn(family, param)


# ---------------------------------------------------------------------------
# Parameter sampling
# ---------------------------------------------------------------------------


def _random_directions(family, count, rng):
    d = family.parameter_dim
    if family.kind == "sip_grid" or family.norms.parameter_norm == "euclidean":
        dirs = rng.standard_normal((count, d))
    else:
        dirs = rng.uniform(-1.0, 1.0, size=(count, d))
    out = []
    for v in dirs:
        nv = family.direction_norm(v)
        while nv <= 1e-12:
            v = rng.standard_normal(d)
            nv = family.direction_norm(v)
        out.append(v / nv)
    return out


def sample_parameters(family, center, radius, count, seed):
    """``count`` parameters at distance in (radius/2, radius] from the
    center under the family's parameter norm.

    The family's registered probe directions come first, placed at exactly
    ``radius``; the remainder is random and deterministic in ``seed``.
    """
    if radius <= 0.0:
        raise PreconditionError("radius must be positive")
    if count < 1:
        raise PreconditionError("count must be >= 1")
    center = np.asarray(center, dtype=float).reshape(-1)
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, int(seed) >> 32 & 0xFFFF])
    params = []
    for d in family.probe_directions[:count]:
        params.append(center + radius * d)
    need = count - len(params)
    if need > 0:
        dirs = _random_directions(family, need, rng)
        # radii in (radius/2, radius], scale-covariant in `radius`
        rho = radius * (1.0 - rng.uniform(0.0, 0.5, size=need))
        for v, r in zip(dirs, rho):
            params.append(center + r * v)
    return params
