"""Descriptive expectation-value estimation from few unknown-state samples.

The driver runs the violated-constraint loop directly on the membership
polytope around the unknown state's expectation values: each check compares
the current Gibbs iterate against the unknown state through a paired
difference measurement, consuming one unknown-state sample per prepared
Gibbs state.  The emitted description is the weight vector defining the
matching Gibbs state; final per-measurement estimates then need no further
unknown-state samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from ..ledger import QueryLedger, cost_shadow_samples, cost_solver_iterations
from ..linalg import gibbs_state, hermitian_part, trace_distance


@dataclass(frozen=True)
class ShadowTask:
    unknown_state: np.ndarray
    measurements: list
    eps: float

    def __post_init__(self):
        tau = hermitian_part(np.asarray(self.unknown_state, dtype=np.complex128))
        object.__setattr__(self, "unknown_state", tau)
        if not 0 < self.eps < 1:
            raise ContractViolation("accuracy must lie in (0, 1)")
        w = np.linalg.eigvalsh(tau)
        if w.min() < -1e-9 or abs(w.sum() - 1.0) > 1e-9:
            raise ContractViolation("unknown state must be a normalized density operator")
        for j, E in enumerate(self.measurements):
            ew = np.linalg.eigvalsh(hermitian_part(np.asarray(E)))
            if ew.min() < -1e-9 or ew.max() > 1 + 1e-9:
                raise ContractViolation(f"measurement {j} violates 0 <= E <= I")

    @property
    def n(self) -> int:
        return self.unknown_state.shape[0]

    @property
    def m(self) -> int:
        return len(self.measurements)

    def expectation(self, j: int) -> float:
        """Pluggable sample source; here backed by the stored state."""
        return float(np.trace(self.measurements[j] @ self.unknown_state).real)


def shadow_tomography(
    task: ShadowTask,
    seed: int = 0,
    ledger: QueryLedger | None = None,
) -> dict:
    """Weight description plus eps-accurate estimates of every expectation.

    The membership loop uses step theta = eps/4 for ceil(ln(n)/theta^2)
    iterations; a clean pass leaves the Gibbs iterate within 3*eps/4 of every
    target, and the final measurement rounds add at most eps/4.  The
    unknown-state sample counter is charged the registered
    log^4(m) * log(n) / eps^4 formula.
    """
    ledger = ledger if ledger is not None else QueryLedger()
    rng = np.random.default_rng(seed)
    n, m, eps = task.n, task.m, task.eps
    theta = eps / 4.0
    T = cost_solver_iterations(n, theta)
    targets = np.array([task.expectation(j) for j in range(m)])
    sample_charge = ledger.charge_formula("shadow_samples", "tau-sample",
                                          m=m, n=n, eps=eps)
    E = [hermitian_part(np.asarray(Ej, dtype=np.complex128))
         for Ej in task.measurements]
    y = np.zeros((m, 2))               # plus/minus weights per measurement
    H = np.zeros((n, n), dtype=np.complex128)
    cap = theta / 4.0
    clean = False
    iterations = 0
    for it in range(T):
        iterations = it + 1
        sigma = gibbs_state(H).mat
        diffs = np.array([float(np.trace(Ej @ sigma).real) for Ej in E]) - targets
        noise = np.clip(rng.normal(size=m) * (theta / 12.0), -cap, cap)
        est = diffs + noise
        threshold = eps / 2.0 + theta / 2.0
        violated = None
        for j in range(m):
            if est[j] >= threshold:
                violated = (j, +1)
                break
            if -est[j] >= threshold:
                violated = (j, -1)
                break
        if violated is None:
            clean = True
            break
        j, sign = violated
        y[j, 0 if sign > 0 else 1] += theta
        H = H + sign * theta * E[j]
    if not clean:
        raise ContractViolation(
            "membership loop exhausted although the unknown state itself is "
            "feasible; internal inconsistency"
        )
    sigma = gibbs_state(H).mat
    rounds = math.ceil(6.0 / eps**2)
    ledger.charge("gibbs-prep", m * rounds)
    final_noise = np.clip(rng.normal(size=m) * (eps / 12.0), -eps / 4.0, eps / 4.0)
    estimates = np.array([float(np.trace(Ej @ sigma).real) for Ej in E]) + final_noise
    errors = np.abs(estimates - targets)
    if errors.max() > eps:
        raise ContractViolation(
            f"estimate error {errors.max():.4f} exceeds the accuracy target {eps}"
        )
    return {
        "weights": y,
        "estimates": estimates,
        "targets": targets,
        "iterations": iterations,
        "sample_charge": sample_charge,
        "sample_formula": cost_shadow_samples(m=m, n=n, eps=eps)["total"],
        "sigma": sigma,
        "distance_to_unknown": trace_distance(
            gibbs_state(H).mat, task.unknown_state
        ),
        "ledger": ledger,
    }
