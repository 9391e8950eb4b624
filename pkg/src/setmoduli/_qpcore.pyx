# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense active-set QP kernel.

Same algorithm and return convention as ``setmoduli._qp_python``; see that
module for the reference semantics.  The hot paths (KKT assembly, the
Gaussian-elimination solve, constraint residuals) run as C loops, which is
what makes the sampling estimators fast.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_ITER_LIMIT = 2
STATUS_SINGULAR = 3

DEF SOLVE_OK = 0
DEF SOLVE_SINGULAR = -1


cdef int _dense_solve(double[:, ::1] K, double[::1] rhs, double[::1] out, int size) noexcept nogil:
    """In-place Gaussian elimination with partial pivoting; K and rhs are scratch."""
    cdef int i, j, k, piv
    cdef double best, tmp, factor
    for k in range(size):
        piv = k
        best = K[k, k] if K[k, k] >= 0 else -K[k, k]
        for i in range(k + 1, size):
            tmp = K[i, k] if K[i, k] >= 0 else -K[i, k]
            if tmp > best:
                best = tmp
                piv = i
        if best < 1e-14:
            return SOLVE_SINGULAR
        if piv != k:
            for j in range(k, size):
                tmp = K[k, j]
                K[k, j] = K[piv, j]
                K[piv, j] = tmp
            tmp = rhs[k]
            rhs[k] = rhs[piv]
            rhs[piv] = tmp
        for i in range(k + 1, size):
            factor = K[i, k] / K[k, k]
            if factor != 0.0:
                for j in range(k, size):
                    K[i, j] -= factor * K[k, j]
                rhs[i] -= factor * rhs[k]
    for k in range(size - 1, -1, -1):
        tmp = rhs[k]
        for j in range(k + 1, size):
            tmp -= K[k, j] * out[j]
        out[k] = tmp / K[k, k]
    return SOLVE_OK


cdef int _assemble_and_solve(double[:, ::1] Q, double[:, ::1] A,
                             int[::1] work, int k,
                             double[::1] rhs_top, double[::1] rhs_bot,
                             double[:, ::1] K, double[::1] rhs, double[::1] sol,
                             int n) noexcept nogil:
    cdef int i, j, size
    size = n + k
    for i in range(size):
        for j in range(size):
            K[i, j] = 0.0
    for i in range(n):
        for j in range(n):
            K[i, j] = Q[i, j]
    for i in range(k):
        for j in range(n):
            K[n + i, j] = A[work[i], j]
            K[j, n + i] = A[work[i], j]
    for i in range(n):
        rhs[i] = rhs_top[i]
    for i in range(k):
        rhs[n + i] = rhs_bot[i]
    return _dense_solve(K[:size, :size], rhs[:size], sol[:size], size)


def qp_active_set(Q, c, A, b, double feas_tol=1e-9, int max_iter=0):
    cdef cnp.ndarray[double, ndim=2] Qa = np.ascontiguousarray(Q, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] ca = np.ascontiguousarray(c, dtype=np.float64)
    cdef int n = ca.shape[0]
    if A is None or np.size(A) == 0:
        A = np.zeros((0, n))
        b = np.zeros(0)
    cdef cnp.ndarray[double, ndim=2] Aa = np.ascontiguousarray(A, dtype=np.float64).reshape(-1, n)
    cdef cnp.ndarray[double, ndim=1] ba = np.ascontiguousarray(b, dtype=np.float64).reshape(-1)
    cdef int m = Aa.shape[0]
    if max_iter <= 0:
        max_iter = 50 * (m + n) + 200

    cdef int size_max = n + m
    cdef cnp.ndarray[double, ndim=2] K = np.zeros((size_max, size_max))
    cdef cnp.ndarray[double, ndim=1] rhs = np.zeros(size_max)
    cdef cnp.ndarray[double, ndim=1] sol = np.zeros(size_max)
    cdef cnp.ndarray[double, ndim=1] x = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1] lam = np.zeros(m)
    cdef cnp.ndarray[int, ndim=1] work = np.zeros(m, dtype=np.intc)
    cdef cnp.ndarray[double, ndim=1] rhs_top = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1] rhs_bot = np.zeros(m)
    cdef cnp.ndarray[double, ndim=1] dx = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1] dlam = np.zeros(m)

    cdef double[:, ::1] Qv = Qa
    cdef double[:, ::1] Av = Aa
    cdef double[::1] bv = ba
    cdef double[::1] cv = ca
    cdef double[:, ::1] Kv = K
    cdef double[::1] rhsv = rhs
    cdef double[::1] solv = sol
    cdef double[::1] xv = x
    cdef double[::1] lamv = lam
    cdef int[::1] workv = work
    cdef double[::1] rtv = rhs_top
    cdef double[::1] rbv = rhs_bot
    cdef double[::1] dxv = dx
    cdef double[::1] dlv = dlam

    cdef int k = 0  # current working-set size
    cdef int iters = 0, i, j, p, j1, jn, idx, status
    cdef double worst, r, slope, viol, t, t1, t2, u, lmin
    cdef double INF = np.inf

    for i in range(n):
        rtv[i] = -cv[i]
    status = _assemble_and_solve(Qv, Av, workv, 0, rtv, rbv, Kv, rhsv, solv, n)
    if status != SOLVE_OK:
        raise np.linalg.LinAlgError("Q is numerically singular")
    for i in range(n):
        xv[i] = solv[i]

    while True:
        iters += 1
        if iters > max_iter:
            return STATUS_ITER_LIMIT, x.copy(), work[:k].copy(), lam[:k].copy(), iters

        # refresh from an exact equality solve on the working set
        if k > 0:
            for i in range(n):
                rtv[i] = -cv[i]
            for i in range(k):
                rbv[i] = bv[workv[i]]
            if _assemble_and_solve(Qv, Av, workv, k, rtv, rbv, Kv, rhsv, solv, n) != SOLVE_OK:
                return STATUS_SINGULAR, x.copy(), work[:k].copy(), lam[:k].copy(), iters
            for i in range(n):
                xv[i] = solv[i]
            jn = -1
            lmin = -1e-11
            for i in range(k):
                lamv[i] = solv[n + i]
                if lamv[i] < lmin:
                    lmin = lamv[i]
                    jn = i
            if jn >= 0:
                for i in range(jn, k - 1):
                    workv[i] = workv[i + 1]
                    lamv[i] = lamv[i + 1]
                k -= 1
                continue

        # most violated inactive constraint
        p = -1
        worst = feas_tol
        for i in range(m):
            idx = 0
            for j in range(k):
                if workv[j] == i:
                    idx = 1
                    break
            if idx:
                continue
            r = -bv[i]
            for j in range(n):
                r += Av[i, j] * xv[j]
            if r > worst:
                worst = r
                p = i
        if p < 0:
            for i in range(k):
                if lamv[i] < 0.0:
                    lamv[i] = 0.0
            return STATUS_OPTIMAL, x.copy(), work[:k].copy(), lam[:k].copy(), iters

        # drive constraint p into the working set
        u = 0.0
        while True:
            iters += 1
            if iters > max_iter:
                return STATUS_ITER_LIMIT, x.copy(), work[:k].copy(), lam[:k].copy(), iters
            for i in range(n):
                rtv[i] = -Av[p, i]
            for i in range(k):
                rbv[i] = 0.0
            if _assemble_and_solve(Qv, Av, workv, k, rtv, rbv, Kv, rhsv, solv, n) != SOLVE_OK:
                return STATUS_SINGULAR, x.copy(), work[:k].copy(), lam[:k].copy(), iters
            for i in range(n):
                dxv[i] = solv[i]
            for i in range(k):
                dlv[i] = solv[n + i]

            slope = 0.0
            viol = -bv[p]
            for j in range(n):
                slope += Av[p, j] * dxv[j]
                viol += Av[p, j] * xv[j]

            # k == n: no further independent row fits; finite t2 is noise
            t2 = INF if (slope >= -1e-13 or k >= n) else -viol / slope
            t1 = INF
            j1 = -1
            for i in range(k):
                if dlv[i] < -1e-13:
                    r = -lamv[i] / dlv[i]
                    if r < t1:
                        t1 = r
                        j1 = i
            t = t1 if t1 < t2 else t2
            if t == INF:
                return STATUS_INFEASIBLE, x.copy(), work[:k].copy(), lam[:k].copy(), iters
            if t < 0.0:
                t = 0.0
            for i in range(n):
                xv[i] += t * dxv[i]
            for i in range(k):
                lamv[i] += t * dlv[i]
            u += t
            if t2 <= t1:
                workv[k] = p
                lamv[k] = u
                k += 1
                break
            for i in range(j1, k - 1):
                workv[i] = workv[i + 1]
                lamv[i] = lamv[i + 1]
            k -= 1
