"""The three oracle input models plus the time-evolution input model.

Each oracle is a queryable object backed by explicit matrices.  Every query
lands on a ledger counter; composite reductions (sparse -> operator,
state -> operator, evolution -> operator/state) charge their registered cost
formulas.  The convention "controlled versions and inverses cost the same as
the plain oracle" is baked in: there is one counter per oracle family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blockenc import (
    BlockEncoding,
    TaylorSpec,
    controlled_simulation,
    dilate,
    evolution_controlled_simulation,
    identity_encoding,
    linear_combination,
    make_purification,
    pad_ancillas,
    purified_density_encoding,
    smooth_function,
    state_prep_pair,
)
from .errors import ContractViolation
from .instance import SdpInstance
from .ledger import QueryLedger, pow2_at_least
from .linalg import hermitian_part



@dataclass
class SparseOracle:
    """Row-sparse access: column indices of nonzeros plus bitstring entries."""

    instance: SdpInstance
    ledger: QueryLedger = field(default_factory=QueryLedger)

    def __post_init__(self):
        self._cols: list[list[np.ndarray]] = []
        for j in range(self.instance.m + 1):
            M = self.instance.constraint(j)
            rows = [np.flatnonzero(np.abs(M[k]) > 0) for k in range(self.instance.n)]
            self._cols.append(rows)

    def _check_j(self, j: int) -> None:
        if not 0 <= j <= self.instance.m:
            raise ContractViolation(f"constraint index {j} out of range")

    def index(self, j: int, k: int, ell: int) -> tuple[int, bool]:
        """Column of the ell-th nonzero of row k of A_j (1-based ell).

        Degenerate queries past the row support return (ell, False), the
        "special symbol" convention.
        """
        self._check_j(j)
        if not 1 <= ell <= self.instance.s:
            raise ContractViolation(f"sparsity slot {ell} out of range")
        if not 0 <= k < self.instance.n:
            raise ContractViolation(f"row {k} out of range")
        self.ledger.charge("sparse-index")
        row = self._cols[j][k]
        if ell <= row.size:
            return int(row[ell - 1]), True
        return ell, False

    def entry(self, j: int, k: int, i: int) -> complex:
        self._check_j(j)
        if not (0 <= k < self.instance.n and 0 <= i < self.instance.n):
            raise ContractViolation("matrix position out of range")
        self.ledger.charge("sparse-entry")
        return complex(self.instance.constraint(j)[k, i])

    def bound(self, j: int) -> float:
        if not 1 <= j <= self.instance.m:
            raise ContractViolation(f"bound index {j} out of range")
        self.ledger.charge("b-vector")
        return float(self.instance.b[j - 1])


def to_block_encoding_sparse(oracle: SparseOracle, j: int, eps: float) -> BlockEncoding:
    """(s, 1, eps)-encoding of A_j from sparse access, O(1) queries charged."""
    if eps <= 0:
        raise ContractViolation("eps must be positive")
    A = oracle.instance.constraint(j)
    charge = oracle.ledger.charge_formula("sparse_to_block", "sparse-entry")
    return dilate(
        A, float(oracle.instance.s), epsilon=eps, target=A, cost=charge,
        note=f"sparse->block j={j}",
    )


@dataclass
class StateDecomposition:
    """Fixed decompositions A_j = w+ q+ - w- q- + wI * I over subnormalized states."""

    plus_weight: np.ndarray      # (m+1,) nonnegative
    minus_weight: np.ndarray     # (m+1,) nonnegative
    id_weight: np.ndarray        # (m+1,) real
    plus_state: list[np.ndarray]   # subnormalized density operators
    minus_state: list[np.ndarray]
    norm_bound: float            # B
    ledger: QueryLedger = field(default_factory=QueryLedger)

    def __post_init__(self):
        self._preps: dict[tuple[int, int], tuple[np.ndarray, int, int]] = {}
        for j in range(self.count):
            tot = self.plus_weight[j] + self.minus_weight[j] + abs(self.id_weight[j])
            if tot > self.norm_bound * (1 + 1e-9):
                raise ContractViolation(
                    f"weights of term {j} sum to {tot:.6f} > B = {self.norm_bound}"
                )

    @property
    def count(self) -> int:
        return len(self.plus_state)

    @property
    def dim(self) -> int:
        return self.plus_state[0].shape[0]

    def matrix(self, j: int) -> np.ndarray:
        return hermitian_part(
            self.plus_weight[j] * self.plus_state[j]
            - self.minus_weight[j] * self.minus_state[j]
            + self.id_weight[j] * np.eye(self.dim)
        )

    def weights(self, j: int) -> tuple[float, float, float]:
        self.ledger.charge("mu")
        return (
            float(self.plus_weight[j]),
            float(self.minus_weight[j]),
            float(self.id_weight[j]),
        )

    def preparation(self, j: int, sign: int) -> tuple[np.ndarray, int, int]:
        """Purification unitary (G, w, a) of the requested state; one query."""
        self.ledger.charge("state-prep")
        key = (j, sign)
        if key not in self._preps:
            state = self.plus_state[j] if sign > 0 else self.minus_state[j]
            self._preps[key] = make_purification(state)
        return self._preps[key]

    @classmethod
    def from_matrices(
        cls, matrices: list[np.ndarray], ledger: QueryLedger | None = None,
    ) -> "StateDecomposition":
        """Canonical split into positive/negative parts (identity weight zero)."""
        wp, wm, wi, ps, ms = [], [], [], [], []
        n = matrices[0].shape[0]
        for M in matrices:
            M = hermitian_part(M)
            w, V = np.linalg.eigh(M)
            pos = (V * np.clip(w, 0, None)) @ V.conj().T
            neg = (V * np.clip(-w, 0, None)) @ V.conj().T
            tp, tm = float(np.trace(pos).real), float(np.trace(neg).real)
            wp.append(tp)
            wm.append(tm)
            wi.append(0.0)
            ps.append(pos / tp if tp > 1e-14 else np.zeros((n, n), dtype=complex))
            ms.append(neg / tm if tm > 1e-14 else np.zeros((n, n), dtype=complex))
        B = max(a + b + abs(c) for a, b, c in zip(wp, wm, wi))
        return cls(
            plus_weight=np.asarray(wp), minus_weight=np.asarray(wm),
            id_weight=np.asarray(wi), plus_state=ps, minus_state=ms,
            norm_bound=max(B, 1.0), ledger=ledger or QueryLedger(),
        )


def _state_constituent(decomp: StateDecomposition, j: int, sign: int,
                       explicit_purification: bool) -> BlockEncoding:
    state = decomp.plus_state[j] if sign > 0 else decomp.minus_state[j]
    if explicit_purification:
        G, w, a = decomp.preparation(j, sign)
        return purified_density_encoding(G, w, a, target=state)
    decomp.ledger.charge("state-prep", 2)
    return dilate(state, 1.0, target=state, note="density-dilation")


def to_block_encoding_state(
    decomp: StateDecomposition, j: int, explicit_purification: bool | None = None,
) -> BlockEncoding:
    """(B, ., <=1e-8)-encoding of A_j assembled from its decomposition.

    Uses the purified-swap construction for qubit-scale states (the explicit
    unitary is 4n^3-dimensional) and an equivalent exact dilation above that;
    the charge, one use of each preparation unitary and inverse, is the same.
    """
    if explicit_purification is None:
        d = decomp.dim
        explicit_purification = d <= 8 and (d & (d - 1)) == 0
    B = decomp.norm_bound
    wp, wm, wi = (
        float(decomp.plus_weight[j]),
        float(decomp.minus_weight[j]),
        float(decomp.id_weight[j]),
    )
    decomp.ledger.charge("mu")
    parts: list[BlockEncoding] = []
    weights: list[float] = []
    for sign, wgt in ((+1, wp), (-1, -wm)):
        if abs(wgt) > 0:
            parts.append(_state_constituent(decomp, j, sign, explicit_purification))
            weights.append(wgt)
    if abs(wi) > 0 or not parts:
        parts.append(identity_encoding(decomp.dim))
        weights.append(wi)
    anc = max(p.ancillas for p in parts)
    parts = [pad_ancillas(p, anc - p.ancillas) for p in parts]
    pair = state_prep_pair(np.asarray(weights), beta=B)
    out = linear_combination(parts, pair, target=decomp.matrix(j))
    if out.epsilon > 1e-8:
        raise ContractViolation("assembled encoding misses the 1e-8 contract")
    return out


@dataclass
class OperatorOracle:
    """Indexed access to shared-normalization block-encodings of the A_j."""

    encodings: list[BlockEncoding]
    alpha: float
    ancillas: int
    ledger: QueryLedger = field(default_factory=QueryLedger)

    def __post_init__(self):
        for j, enc in enumerate(self.encodings):
            if abs(enc.alpha - self.alpha) > 1e-12 or enc.ancillas != self.ancillas:
                raise ContractViolation(f"encoding {j} does not share (alpha, a)")
            if enc.target is not None and enc.epsilon > 1e-9:
                raise ContractViolation(f"encoding {j} is not zero-error")

    @property
    def count(self) -> int:
        return len(self.encodings)

    def encoding(self, j: int) -> BlockEncoding:
        self.ledger.charge("operator-U")
        return self.encodings[j]

    @classmethod
    def from_instance(
        cls, instance: SdpInstance, alpha: float = 1.0,
        ledger: QueryLedger | None = None,
    ) -> "OperatorOracle":
        encs = [
            dilate(instance.constraint(j), alpha, target=instance.constraint(j))
            for j in range(instance.m + 1)
        ]
        return cls(encodings=encs, alpha=alpha, ancillas=1,
                   ledger=ledger or QueryLedger())


@dataclass
class HamiltonianOracle:
    """Evolution access: unit-time steps exp(i A_j / t_j) with a scale bound tau."""

    matrices: list[np.ndarray]
    t: np.ndarray
    tau: float
    ledger: QueryLedger = field(default_factory=QueryLedger)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        if self.t.min() < 2:
            raise ContractViolation("every time scale t_j must be at least 2")
        if self.tau < self.t.max() - 1e-12:
            raise ContractViolation("tau must bound every t_j")
        self._steps = []
        for A, tj in zip(self.matrices, self.t):
            w, V = np.linalg.eigh(hermitian_part(A))
            self._steps.append((V * np.exp(1j * w / tj)) @ V.conj().T)

    @property
    def count(self) -> int:
        return len(self.matrices)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def time_scale(self, j: int) -> float:
        self.ledger.charge("b-vector")   # classical-description oracle
        return float(self.t[j])

    def evolve(self, j: int) -> np.ndarray:
        self.ledger.charge("hamiltonian")
        return self._steps[j]


def hamiltonian_to_operator(
    oracle: HamiltonianOracle, j: int, eps: float,
) -> BlockEncoding:
    """(2*tau, ., eps)-encoding of A_j from log(1/eps) evolution queries.

    The identity function is pushed through the smooth-function machinery on
    H' = A_j / t_j, rescaled by t_j / tau to give a uniform normalization:
    f(x) = (t_j/tau) * x with x0 = 0, r = 1, delta = pi/2 - 1, K = 2.
    """
    tj = float(oracle.t[j])
    scale = tj / oracle.tau
    delta = math.pi / 2.0 - 1.0
    eps_prime = eps / 2.0
    M = pow2_at_least(math.log2(max(2.0, 1.0 / eps_prime)))
    ctrl = evolution_controlled_simulation(
        oracle._steps[j], M=M, tau_steps=1,
        hamiltonian=hermitian_part(oracle.matrices[j]) / tj, error=0.0,
    )
    spec = TaylorSpec(
        x0=0.0, r=1.0, delta=delta, K=2.0,
        coeff=lambda l, s=scale: s if l == 1 else 0.0,
        fn=lambda x, s=scale: s * x,
        eps_prime=eps_prime, name="identity-map",
    )
    out = smooth_function(ctrl, spec)
    charge = oracle.ledger.charge_formula("hamiltonian_to_block", "hamiltonian", eps=eps)
    target = hermitian_part(oracle.matrices[j])
    return BlockEncoding(
        unitary=out.unitary, alpha=2.0 * oracle.tau, ancillas=out.ancillas,
        epsilon=eps, dim=out.dim, target=target,
        reported_ancillas=out.reported_ancillas, cost=charge,
        note=f"evolution->operator j={j}",
    )


def hamiltonian_to_state(
    oracle: HamiltonianOracle, j: int, eps: float,
) -> dict:
    """State-model entry for a diagonal A_j: states (I +/- A_j/t_j) / (2n).

    Built through f(x) = sqrt(x/2) with x0 = 1, r = 1/2, delta = pi/6 - 1/2,
    K = 1 applied to I +/- A_j/t_j; the reconstruction weights are n*t_j and
    the uniform normalization bound is B = n * tau.
    """
    A = np.asarray(oracle.matrices[j])
    if np.abs(A - np.diag(np.diag(A))).max() > 0:
        raise ContractViolation("state-model reduction requires diagonal matrices")
    tj = float(oracle.t[j])
    if tj < 4 or oracle.tau < 4:
        raise ContractViolation("the reduction needs t_j >= 4 and tau >= 4")
    n = oracle.dim
    delta = math.pi / 6.0 - 0.5

    def coeff(l: int) -> float:
        out = 1.0 / math.sqrt(2.0)
        for i in range(l):
            out *= (0.5 - i) / (i + 1)
        return out

    spec = TaylorSpec(
        x0=1.0, r=0.5, delta=delta, K=1.0, coeff=coeff,
        fn=lambda x: math.sqrt(x / 2.0), eps_prime=eps, name="sqrt-half",
    )
    states = {}
    for sign in (+1, -1):
        Hprime = hermitian_part(np.eye(n) + sign * hermitian_part(A) / tj)
        base = dilate(Hprime, 2.0, target=Hprime)
        M = pow2_at_least(spec.r * math.log2(max(2.0, 1.0 / eps)) / delta)
        tau = math.pi / (2.0 * (spec.r + delta))
        ctrl = controlled_simulation(base, M, tau, eps=eps / 2.0)
        # block sqrt((I +/- A/t)/2); applied to the maximally entangled state
        # it leaves the subnormalized operator (I +/- A/t)/(2n)
        enc = smooth_function(ctrl, spec)
        root = enc.alpha * enc.block
        states[sign] = hermitian_part(root @ root.conj().T) / n
        oracle.ledger.charge_formula("hamiltonian_to_block", "hamiltonian", eps=eps)
    resid = np.linalg.norm(
        states[+1] - states[-1] - hermitian_part(A) / (n * tj), 2
    )
    if resid > eps:
        raise ContractViolation(f"state reconstruction residual {resid:.3e} > {eps:.3e}")
    return {
        "plus": states[+1],
        "minus": states[-1],
        "weight": n * tj,
        "norm_bound": n * oracle.tau,
        "residual": float(resid),
    }


def state_decomposition_for_instance(
    instance: SdpInstance, ledger: QueryLedger | None = None,
) -> StateDecomposition:
    mats = [instance.constraint(j) for j in range(instance.m + 1)]
    return StateDecomposition.from_matrices(mats, ledger=ledger)


def hamiltonian_oracle_for_instance(
    instance: SdpInstance, tau: float = 2.0, ledger: QueryLedger | None = None,
) -> HamiltonianOracle:
    mats = [instance.constraint(j) for j in range(instance.m + 1)]
    t = np.full(len(mats), float(tau))
    return HamiltonianOracle(matrices=mats, t=t, tau=float(tau),
                             ledger=ledger or QueryLedger())
