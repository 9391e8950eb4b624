"""Point-based modulus formulas for structured mapping classes.

For a convex quadratic program under canonical perturbations (cost vector
and right-hand side move, structural matrices stay fixed) with a unique
nondegenerate nominal solution, the modulus is the largest operator norm of
the top block of the inverse KKT matrix over admissible active subsets.
For one-dimensional sub-level sets of a smooth function, it is the largest
reciprocal slope over the active boundary points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from . import geometry as geo
from .errors import (
    EnumerationBudgetError,
    NoAdmissibleActiveSetError,
    PreconditionError,
    SingularMatrixError,
)
from .families import isolate_level_crossings, solve_qp_optimal_set

INF = float("inf")

ACTIVITY_RTOL = 1e-7
UNIQUENESS_DIAMETER = 1e-7
ACTIVE_SET_BUDGET = 20
CONDITION_LIMIT = 1e12
GRADIENT_TOL = 1e-8

NORM_CHOICES = ("spectral", "inf_induced")


@dataclass
class ActiveSet:
    """Active constraint indices at the nominal optimum."""

    indices: tuple
    xbar: np.ndarray


@dataclass
class KktCertificate:
    """One admissible active subset with its block matrix and norm.

    ``multipliers`` certify that the negative gradient lies in the cone of
    the subset's constraint normals; ``partial_inverse_norm`` is the chosen
    induced norm of the top n-row block of the inverse KKT matrix.
    """

    D: tuple
    A_D: np.ndarray
    M_D: np.ndarray
    multipliers: np.ndarray
    partial_inverse_norm: float
    norm_choice: str

    def validate(self, Q, grad, tol=1e-7):
        """Re-check every stated invariant; used by the certificate tests."""
        k = len(self.D)
        if k:
            s = np.linalg.svd(self.A_D, compute_uv=False)
            if s[-1] <= 1e-10 * max(1.0, s[0]):
                return False
        if np.linalg.cond(self.M_D) > CONDITION_LIMIT:
            return False
        if np.any(self.multipliers < -tol):
            return False
        resid = (self.A_D.T @ self.multipliers if k else 0.0) + grad
        return float(np.linalg.norm(resid)) <= tol * (1.0 + np.linalg.norm(grad))


def cone_membership(v, generators, tol=1e-9):
    """Whether v is a nonnegative combination of the generators.

    Solved by nonnegative least squares with a residual threshold; the
    empty generator list spans only the origin.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    gens = [np.asarray(g, dtype=float).reshape(-1) for g in generators]
    if not gens:
        return bool(np.linalg.norm(v) <= tol), np.zeros(0)
    G = np.column_stack(gens)
    lam, rnorm = nnls(G, v)
    holds = rnorm <= tol * (1.0 + np.linalg.norm(v))
    return bool(holds), (lam if holds else None)


def operator_partial_inverse_norm(M_D, n, norm_choice="spectral"):
    """Induced norm of the top n-row block of the inverse of M_D.

    "spectral" is the Euclidean-to-Euclidean norm (largest singular
    value); "inf_induced" the Chebyshev-to-Chebyshev norm (largest
    absolute row sum).
    """
    if norm_choice not in NORM_CHOICES:
        raise PreconditionError(f"norm_choice must be one of {NORM_CHOICES}")
    M_D = np.asarray(M_D, dtype=float)
    if M_D.shape[0] != M_D.shape[1]:
        raise PreconditionError("M_D must be square")
    if np.linalg.cond(M_D) > CONDITION_LIMIT:
        raise SingularMatrixError("M_D is numerically singular")
    B = np.linalg.inv(M_D)[:n, :]
    if norm_choice == "spectral":
        return float(np.linalg.svd(B, compute_uv=False)[0])
    return float(np.max(np.sum(np.abs(B), axis=1)))


def _active_indices(A, b, xbar):
    if A.shape[0] == 0:
        return ()
    resid = A @ xbar - b
    return tuple(
        int(i) for i in range(A.shape[0])
        if abs(resid[i]) <= ACTIVITY_RTOL * (1.0 + abs(b[i]))
    )


def _check_unique_optimum(optimal_set):
    if optimal_set.is_empty:
        raise PreconditionError("nominal program is infeasible or unbounded")
    if isinstance(optimal_set, geo.FinitePointSet):
        if optimal_set.points.shape[0] != 1:
            raise PreconditionError("nominal optimal set is not a singleton")
        return optimal_set.points[0]
    box = geo.bounding_box(optimal_set)
    if box is None:
        raise PreconditionError("nominal program is infeasible or unbounded")
    lo, hi = box
    if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
        raise PreconditionError("nominal optimal set is unbounded")
    if float(np.max(hi - lo)) > UNIQUENESS_DIAMETER:
        raise PreconditionError(
            f"nominal optimal set has diameter {float(np.max(hi - lo)):.3g}; "
            "a unique solution is required"
        )
    return 0.5 * (lo + hi)


def qp_canonical_modulus(Q, A, c0, b0, norm_choice="spectral"):
    """Exact modulus of the optimal-point map of min .5 x'Qx + c'x subject
    to Ax <= b under perturbations of (c, b).

    Enumerates the admissible active subsets D (linearly independent
    normals whose cone contains the negative gradient), builds each KKT
    block matrix, and returns the maximum partial-inverse norm together
    with all certificates (attaining ones are first among equals in
    enumeration order).
    """
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, n)
    c0 = np.asarray(c0, dtype=float).reshape(-1)
    b0 = np.asarray(b0, dtype=float).reshape(-1)
    if not np.allclose(Q, Q.T, atol=1e-12):
        raise PreconditionError("Q must be symmetric")
    eigs = np.linalg.eigvalsh(Q)
    if eigs.size and eigs[0] < -1e-9 * max(1.0, abs(eigs[-1])):
        raise PreconditionError("Q must be positive semidefinite")

    optimal_set = solve_qp_optimal_set(Q, A, c0, b0)
    xbar = _check_unique_optimum(optimal_set)
    grad = Q @ xbar + c0
    T = _active_indices(A, b0, xbar)
    if len(T) > ACTIVE_SET_BUDGET:
        raise EnumerationBudgetError(
            f"active set has {len(T)} constraints; enumeration budget is "
            f"{ACTIVE_SET_BUDGET}"
        )

    certificates = []
    best = -INF
    for r in range(len(T) + 1):
        for D in itertools.combinations(T, r):
            A_D = A[list(D)] if r else np.zeros((0, n))
            if r:
                s = np.linalg.svd(A_D, compute_uv=False)
                if s[-1] <= 1e-10 * max(1.0, s[0]):
                    continue
            holds, lam = cone_membership(-grad, list(A_D))
            if not holds:
                continue
            M_D = np.block([[Q, A_D.T], [A_D, np.zeros((r, r))]]) if r else Q.copy()
            try:
                value = operator_partial_inverse_norm(M_D, n, norm_choice)
            except SingularMatrixError:
                continue
            certificates.append(
                KktCertificate(tuple(D), A_D, M_D, lam, value, norm_choice)
            )
            best = max(best, value)
    if not certificates:
        raise NoAdmissibleActiveSetError(
            "no admissible active subset: the formula's hypotheses fail here"
        )
    certificates.sort(key=lambda cert: -cert.partial_inverse_norm)
    return best, certificates


def certificate_probe_directions(certificates, n, m, limit=2):
    """Worst-case (c, b) perturbation directions realized by certificates.

    For each certificate the direction that attains the partial-inverse
    norm is mapped back to a packed (c, b) parameter direction (zero on
    inactive right-hand-side rows), returned with both signs.  Registering
    these as estimator probes makes the sampling estimator attain the
    formula value instead of approaching it blindly.
    """
    dirs = []
    for cert in certificates[:limit]:
        B = np.linalg.inv(cert.M_D)[:n, :]
        if cert.norm_choice == "inf_induced":
            row = int(np.argmax(np.sum(np.abs(B), axis=1)))
            v = np.sign(B[row])
            v[v == 0.0] = 1.0
        else:
            v = np.linalg.svd(B)[2][0]
        dc = -v[:n]
        db = np.zeros(m)
        for idx, row_idx in enumerate(cert.D):
            db[row_idx] = v[n + idx]
        d = np.concatenate([dc, db])
        dirs.extend([d, -d])
    return dirs


@dataclass
class SublevelModulus:
    """Largest boundary expansion rate of a 1-D sub-level set.

    ``value`` is +inf with ``vanishing_gradient`` set when some boundary
    point has (numerically) zero slope, violating the formula's premise.
    """

    value: float
    boundary_points: list
    vanishing_gradient: bool = False


def sublevel_modulus(f, fprime, alpha, domain, grid_points=2001,
                     gradient_tol=GRADIENT_TOL):
    """max over boundary points of the sub-level set {f <= alpha} in the
    compact domain of 1 / |f'|.

    Boundary points are the level crossings of f, including domain
    endpoints that sit exactly on the level; endpoints strictly below the
    level are interior to the constraint and contribute nothing.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise PreconditionError("domain must be a nondegenerate interval")
    xs = np.linspace(lo, hi, int(grid_points))
    if float(np.min(np.asarray(f(xs), dtype=float))) > alpha + 1e-12:
        raise PreconditionError("nominal sub-level set is empty on the domain")
    roots = isolate_level_crossings(f, float(alpha), (lo, hi), grid_points)
    if not roots:
        # the whole domain is strictly below the level: no active boundary
        return SublevelModulus(0.0, [])
    slopes = [abs(float(fprime(r))) for r in roots]
    if any(s < gradient_tol for s in slopes):
        return SublevelModulus(INF, roots, vanishing_gradient=True)
    return SublevelModulus(max(1.0 / s for s in slopes), roots)
