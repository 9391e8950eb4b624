"""Thin LP layer over scipy's HiGHS solver.

Used for inequality-form LPs: optimal values of parametric programs,
recession checks in dimension > 2, and Chebyshev point-to-polyhedron
distances.  One-dimensional problems are reduced analytically before ever
reaching here.
"""

import numpy as np
from scipy.optimize import linprog

from .errors import SolverFailureError

_STATUS = {0: "optimal", 1: "iteration-limit", 2: "infeasible", 3: "unbounded"}


def solve_lp(c, A, b):
    """min c'x s.t. Ax <= b with free variables.

    Returns (status, value, x) with status in
    {"optimal", "infeasible", "unbounded"}.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if A is None or np.size(A) == 0:
        if np.any(np.abs(c) > 0.0):
            return "unbounded", -np.inf, None
        return "optimal", 0.0, np.zeros(n)
    res = linprog(
        c,
        A_ub=np.asarray(A, dtype=float),
        b_ub=np.asarray(b, dtype=float),
        bounds=[(None, None)] * n,
        method="highs",
    )
    status = _STATUS.get(res.status, "failed")
    if status in ("iteration-limit", "failed"):
        raise SolverFailureError(f"linprog failed: {res.message}")
    if status != "optimal":
        return status, (np.inf if status == "infeasible" else -np.inf), None
    return "optimal", float(res.fun), np.asarray(res.x, dtype=float)
