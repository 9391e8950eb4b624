"""Selects the QP kernel backend at import time.

The compiled extension is preferred; the pure-Python kernel is the
fallback.  Set ``SETMODULI_PURE_PYTHON=1`` to force the fallback (used by
the benchmark and the cross-backend tests).
"""

import os

import numpy as np

from . import _qp_python

STATUS_OPTIMAL = _qp_python.STATUS_OPTIMAL
STATUS_INFEASIBLE = _qp_python.STATUS_INFEASIBLE
STATUS_ITER_LIMIT = _qp_python.STATUS_ITER_LIMIT
STATUS_SINGULAR = _qp_python.STATUS_SINGULAR

_force_python = os.environ.get("SETMODULI_PURE_PYTHON", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

try:
    from . import _qpcore as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

_impl = _qp_python if (_force_python or _compiled is None) else _compiled


def backend_name():
    return "python" if _impl is _qp_python else "compiled"


def have_compiled():
    return _compiled is not None


def qp_solve(Q, c, A, b, feas_tol=1e-9, max_iter=0):
    """Solve min 0.5 x'Qx + c'x s.t. Ax <= b (Q symmetric positive definite).

    Rows of (A, b) are normalized to unit Euclidean norm before the solve,
    so ``feas_tol`` measures geometric constraint violation; the returned
    multipliers are rescaled back to the caller's row scaling.

    Returns (status, x, active, lam, iters).
    """
    def writable(arr):
        arr = np.ascontiguousarray(arr, dtype=float)
        return arr.copy() if not arr.flags.writeable else arr

    Q = writable(Q)
    c = writable(c)
    if A is not None and np.size(A):
        A = np.ascontiguousarray(A, dtype=float)
        b = np.ascontiguousarray(b, dtype=float).reshape(-1)
        scale = np.linalg.norm(A, axis=1)
        scale = np.where(scale > 0.0, scale, 1.0)
        An = np.ascontiguousarray(A / scale[:, None])
        bn = np.ascontiguousarray(b / scale)
    else:
        An, bn, scale = None, None, None
    status, x, active, lam, iters = _impl.qp_active_set(Q, c, An, bn, feas_tol, max_iter)
    if scale is not None and len(active):
        lam = lam / scale[active]
    return status, x, active, lam, iters
