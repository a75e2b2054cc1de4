"""Desk-scale reference optima for cross-checking the simulated solvers.

Diagonal instances reduce to linear programs and go through scipy's HiGHS
interface; dense Hermitian instances use cvxpy (an optional dependency,
imported lazily).  These paths share no code with the solver under test.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .instance import SdpInstance


def reference_optimum(instance: SdpInstance, tol: float = 1e-9) -> float:
    if instance.is_diagonal:
        c = -np.real(np.diag(instance.C))
        A_ub = np.stack([np.real(np.diag(Aj)) for Aj in instance.A])
        res = linprog(c, A_ub=A_ub, b_ub=instance.b, bounds=(0, None),
                      method="highs")
        if not res.success:
            raise RuntimeError(f"reference LP failed: {res.message}")
        return -float(res.fun)
    import warnings

    import cvxpy as cp

    n = instance.n
    X = cp.Variable((n, n), hermitian=True)
    constraints = [X >> 0]
    for Aj, bj in zip(instance.A, instance.b):
        constraints.append(cp.real(cp.trace(Aj @ X)) <= bj)
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(instance.C @ X))), constraints)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value = prob.solve(solver=cp.CLARABEL)
        if prob.status != "optimal":
            value = prob.solve(solver=cp.SCS, eps=1e-8, max_iters=100_000)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"reference solve ended with status {prob.status}")
    return float(value)
