"""Experiment-distribution design maximizing the information floor.

The program maximizes the smallest eigenvalue of the weighted information
matrix F_p = sum_i p_i u_i u_i^T / sigma_i^2.  In standard primal form the
variable is diag(z, X) with one row per experiment, a trace floor on X, and
objective -z; the experiment distribution is read off the dual multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from ..instance import SdpInstance
from ..linalg import min_eigenvalue
from ..solver import sdp_solve


@dataclass(frozen=True)
class DesignTask:
    vectors: np.ndarray          # (k, d) unit rows
    sigmas: np.ndarray           # (k,) positive noise scales

    def __post_init__(self):
        U = np.asarray(self.vectors, dtype=np.float64)
        s = np.asarray(self.sigmas, dtype=np.float64)
        object.__setattr__(self, "vectors", U)
        object.__setattr__(self, "sigmas", s)
        if U.ndim != 2 or s.shape != (U.shape[0],):
            raise ContractViolation("need (k, d) vectors and k noise scales")
        if s.min() <= 0:
            raise ContractViolation("noise scales must be positive")
        norms = np.linalg.norm(U, axis=1)
        if np.abs(norms - 1.0).max() > 1e-9:
            raise ContractViolation("experiment vectors must be unit length")

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def precision_scale(self) -> float:
        return 1.0 / (self.d * float(np.max(self.sigmas) ** 2))

    def information_matrix(self, p) -> np.ndarray:
        F = np.zeros((self.d, self.d))
        for pi, u, s in zip(np.asarray(p, dtype=float), self.vectors, self.sigmas):
            F += pi * np.outer(u, u) / s**2
        return F


def build_e_optimal(task: DesignTask) -> tuple[SdpInstance, dict]:
    """(d+1)-dimensional instance; returns it with the row rescaling info."""
    d, k = task.d, task.k
    n = d + 1
    C = np.zeros((n, n), dtype=np.complex128)
    C[0, 0] = -1.0
    zcap = task.precision_scale          # a feasible objective level
    R = 1.0 + max(zcap, 2.0 / d)
    A = [np.eye(n, dtype=np.complex128)]
    b = [R]
    scales = []
    for u, s in zip(task.vectors, task.sigmas):
        block = np.outer(u, u) / s**2
        scale = 1.0 / max(1.0, float(np.linalg.norm(block, 2)))
        M = np.zeros((n, n), dtype=np.complex128)
        M[0, 0] = -1.0
        M[1:, 1:] = block
        A.append(scale * M)
        b.append(0.0)
        scales.append(scale)
    floor = np.zeros((n, n), dtype=np.complex128)
    floor[1:, 1:] = -np.eye(d)
    A.append(floor)
    b.append(-1.0)
    r = 1.0 + max(1.0 / min(scales), 1.0) + zcap
    instance = SdpInstance(A=np.stack(A), C=C, b=np.asarray(b), R=R, r=r)
    return instance, {"scales": np.asarray(scales), "R": R, "r": r}


def solve_e_optimal(task: DesignTask, eps: float, seed: int = 0) -> dict:
    """Distribution p and the certified information floor t = lambda_min(F_p)."""
    instance, info = build_e_optimal(task)
    outcome = sdp_solve(instance, eps, model="sparse", seed=seed)
    dual = outcome.dual
    # dual layout: [trace bound, k experiment rows, trace floor]
    p = dual[1 : 1 + task.k] * info["scales"]
    total = float(p.sum())
    if total > 1.0 + eps + 1e-7:
        raise ContractViolation(f"distribution mass {total:.6f} exceeds 1 + eps")
    t = float(min_eigenvalue(task.information_matrix(p)))
    return {
        "p": p,
        "t": t,
        "opt_estimate": outcome.opt_estimate,
        "t_from_opt": -outcome.opt_estimate,
        "outcome": outcome,
        "instance": instance,
    }
