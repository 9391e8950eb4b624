import numpy as np
import pytest

from setmoduli import exact
from setmoduli import families as fam
from setmoduli.geometry import NormSpec


def make_nondegenerate_qp(rng, n, m, value_cap=50.0):
    """Random strongly convex QP with a unique nondegenerate optimum.

    Built backward: pick the solution, give the active rows strictly
    positive multipliers and the inactive rows strict slack, then derive
    the cost.  Instances whose exact modulus exceeds ``value_cap`` are
    resampled to keep the floating-point margins sane.
    """
    while True:
        L = rng.standard_normal((n, n))
        Q = L @ L.T + (0.3 + rng.uniform()) * np.eye(n)
        x_star = rng.uniform(-1.0, 1.0, n)
        k = int(rng.integers(0, min(n, m) + 1))
        A = rng.standard_normal((m, n))
        A /= np.linalg.norm(A, axis=1, keepdims=True)
        if k and np.linalg.matrix_rank(A[:k], tol=1e-6) != k:
            continue
        b = np.empty(m)
        b[:k] = A[:k] @ x_star
        b[k:] = A[k:] @ x_star + rng.uniform(0.5, 2.0, m - k)
        lam = rng.uniform(0.5, 2.0, k)
        c = -Q @ x_star - (A[:k].T @ lam if k else 0.0)
        value, certs = exact.qp_canonical_modulus(Q, A, c, b, "spectral")
        if value <= value_cap:
            return Q, A, c, b, x_star, k, value, certs


def qp_family_with_probes(Q, A, certs):
    n = Q.shape[0]
    m = A.shape[0]
    dirs = exact.certificate_probe_directions(certs, n, m)
    return fam.qp_canonical_family(Q, A, norms=NormSpec("euclidean", "euclidean"),
                                   probe_directions=dirs)


def random_feasible_lp(rng, n, m, slack=(0.2, 1.0)):
    """Random lp_feasible family instance with a nonempty nominal set."""
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    x0 = rng.uniform(-1.0, 1.0, n)
    b = A @ x0 + rng.uniform(*slack, m)
    family = fam.lp_feasible_family(A, b, norms=NormSpec("chebyshev", "euclidean"))
    return family, fam.lp_pack(family, A, b)


def random_solvable_lcp(rng, n):
    """Random LCP family instance whose nominal solution set is nonempty."""
    while True:
        M = rng.standard_normal((n, n))
        q = rng.uniform(-1.0, 1.0, n)
        sol = fam.solve_lcp_enumerate(M, q)
        if not sol.is_empty:
            family = fam.lcp_family(n, norms=NormSpec("chebyshev", "euclidean"))
            return family, fam.lcp_pack(M, q), sol


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
