"""Hard two-dimensional LP family in the time-evolution input model.

Case "a" makes every constraint matrix I/2 so the optimum is exactly 2;
case "b" perturbs one matrix to I/2 + eps*Z, pinning the optimum to
1/(1/2 + eps) inside [2 - 4*eps, 2 - 2*eps].  Constraint matrices are
exposed through evolution oracles exp(i A_j / tau).
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from ..instance import SdpInstance
from ..ledger import QueryLedger
from ..oracles import HamiltonianOracle

Z = np.diag([1.0, -1.0]).astype(np.complex128)


def build_lower_bound_lp(
    m: int,
    eps: float,
    tau: float,
    case: str,
    j_star: int = 1,
    ledger: QueryLedger | None = None,
) -> tuple[SdpInstance, HamiltonianOracle, dict]:
    """Instance, evolution oracle, and the attached closed-form optimum."""
    if not 0 < eps <= 0.5:
        raise ContractViolation("perturbation must lie in (0, 1/2]")
    if m < 2 or tau < 1:
        raise ContractViolation("need at least two constraints and tau >= 1")
    if case not in ("a", "b"):
        raise ContractViolation("case must be 'a' or 'b'")
    if case == "b" and not 1 <= j_star <= m:
        raise ContractViolation("perturbed index out of range")
    eye = np.eye(2, dtype=np.complex128)
    A = [eye]                      # trace constraint
    b = [2.0]
    for j in range(1, m + 1):
        M = eye / 2.0
        if case == "b" and j == j_star:
            M = eye / 2.0 + eps * Z
        A.append(M)
        b.append(1.0)
    C = np.diag([1.0, 0.0]).astype(np.complex128)
    instance = SdpInstance(A=np.stack(A), C=C, b=np.asarray(b), R=2.0, r=2.0)
    opt = 2.0 if case == "a" else 1.0 / (0.5 + eps)
    mats = [instance.constraint(j) for j in range(instance.m + 1)]
    tau_eff = max(float(tau), 2.0)
    oracle = HamiltonianOracle(
        matrices=mats, t=np.full(len(mats), tau_eff), tau=tau_eff,
        ledger=ledger or QueryLedger(),
    )
    info = {"opt": opt, "case": case, "eps": eps, "tau": tau_eff,
            "bracket": (2.0 - 4.0 * eps, 2.0 - 2.0 * eps) if case == "b" else (2.0, 2.0)}
    return instance, oracle, info
