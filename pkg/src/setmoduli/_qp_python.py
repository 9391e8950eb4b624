"""Pure-NumPy implementation of the dense active-set QP kernel.

Solves   min 0.5 x'Qx + c'x   subject to   Ax <= b
for small dense instances with symmetric positive definite Q.  This is the
fallback used when the compiled extension ``setmoduli._qpcore`` is not
available; both implement the same dual active-set iteration (start at the
unconstrained minimizer, drive in the most violated constraint, drop
blocking multipliers) and the same return convention.

Returns (status, x, active, lam, iters) where ``active`` is the final
working set as an int array and ``lam`` its multipliers.  Status codes are
shared through module-level constants.
"""

import numpy as np

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_ITER_LIMIT = 2
STATUS_SINGULAR = 3


def _kkt_solve(Q, A, work, rhs_top, rhs_bot):
    """Solve [[Q, Aw'], [Aw, 0]] [u; v] = [rhs_top; rhs_bot] for the rows in work."""
    n = Q.shape[0]
    k = len(work)
    K = np.zeros((n + k, n + k))
    K[:n, :n] = Q
    if k:
        Aw = A[work]
        K[:n, n:] = Aw.T
        K[n:, :n] = Aw
    rhs = np.concatenate([rhs_top, rhs_bot])
    sol = np.linalg.solve(K, rhs)
    return sol[:n], sol[n:]


def qp_active_set(Q, c, A, b, feas_tol=1e-9, max_iter=0):
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if A is None:
        A = np.zeros((0, n))
        b = np.zeros(0)
    A = np.asarray(A, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    m = A.shape[0]
    if max_iter <= 0:
        max_iter = 50 * (m + n) + 200

    x = np.linalg.solve(Q, -c)
    work = []  # active working set (row indices), kept linearly independent
    lam = []  # multipliers, aligned with work
    iters = 0

    while True:
        iters += 1
        if iters > max_iter:
            return STATUS_ITER_LIMIT, x, np.array(work, dtype=int), np.array(lam), iters

        # Refresh (x, lam) from an exact equality solve on the working set;
        # this removes drift accumulated by the incremental steps.
        if work:
            try:
                x, lam_arr = _kkt_solve(Q, A, work, -c, b[work])
            except np.linalg.LinAlgError:
                return STATUS_SINGULAR, x, np.array(work, dtype=int), np.array(lam), iters
            lam = list(lam_arr)
            j_neg = int(np.argmin(lam_arr)) if len(lam) else -1
            if j_neg >= 0 and lam[j_neg] < -1e-11:
                del work[j_neg]
                del lam[j_neg]
                continue

        if m:
            resid = A @ x - b
            if work:
                resid[work] = -np.inf
            p = int(np.argmax(resid))
            worst = resid[p]
        else:
            p, worst = -1, -np.inf
        if p < 0 or worst <= feas_tol:
            lam_arr = np.maximum(np.array(lam, dtype=float), 0.0)
            return STATUS_OPTIMAL, x, np.array(work, dtype=int), lam_arr, iters

        # Drive constraint p into the working set.
        u = 0.0
        while True:
            iters += 1
            if iters > max_iter:
                return STATUS_ITER_LIMIT, x, np.array(work, dtype=int), np.array(lam), iters
            try:
                dx, dlam = _kkt_solve(Q, A, work, -A[p], np.zeros(len(work)))
            except np.linalg.LinAlgError:
                return STATUS_SINGULAR, x, np.array(work, dtype=int), np.array(lam), iters
            slope = float(A[p] @ dx)  # = -dx'Q dx <= 0
            viol = float(A[p] @ x - b[p])

            # A working set of n independent rows cannot absorb another row;
            # a finite t2 there is numerical noise from a near-singular solve.
            if slope >= -1e-13 or len(work) >= n:
                t2 = np.inf
            else:
                t2 = -viol / slope
            t1 = np.inf
            j1 = -1
            for idx in range(len(work)):
                if dlam[idx] < -1e-13:
                    tj = -lam[idx] / dlam[idx]
                    if tj < t1:
                        t1, j1 = tj, idx
            t = min(t1, t2)
            if not np.isfinite(t):
                return STATUS_INFEASIBLE, x, np.array(work, dtype=int), np.array(lam), iters
            t = max(t, 0.0)
            x = x + t * dx
            for idx in range(len(work)):
                lam[idx] += t * dlam[idx]
            u += t
            if t2 <= t1:
                work.append(p)
                lam.append(u)
                break
            del work[j1]
            del lam[j1]
