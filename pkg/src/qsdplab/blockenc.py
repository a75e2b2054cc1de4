"""Block-encoding algebra as explicit unitaries.

A block-encoding is a unitary whose top-left block, after projecting an
ancilla register onto |0>, equals a target matrix divided by a normalization
alpha.  The convention throughout is ancilla-register-first: for a system of
dimension ``dim`` and ``a`` physical ancilla qubits the unitary is a
(2^a * dim)-dimensional matrix and the encoded block is ``U[:dim, :dim]``.

Physical ancilla counts are kept minimal (constructions re-dilate computed
blocks where possible); the ancilla expressions quoted by each routine
contracts are tracked separately in ``reported_ancillas`` and affect only
reporting, never the linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ContractViolation
from .ledger import QueryLedger, pow2_at_least, smooth_function_sim_size
from .linalg import hermitian_part, matrix_function

UNITARITY_ATOL = 1e-10
_FULL_CHECK_DIM = 1024


def unitarity_residual(U: np.ndarray) -> float:
    """||U^dag U - I||; randomized probe above the full-check size cutoff."""
    d = U.shape[0]
    if d <= _FULL_CHECK_DIM:
        return float(np.linalg.norm(U.conj().T @ U - np.eye(d), 2))
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(8):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        v /= np.linalg.norm(v)
        worst = max(worst, float(np.linalg.norm(U.conj().T @ (U @ v) - v)))
    return worst


def swap_tensor_factors(U: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Reindex a unitary on C^n1 (x) C^n2 as one on C^n2 (x) C^n1."""
    N = n1 * n2
    if U.shape != (N, N):
        raise ContractViolation(f"shape {U.shape} incompatible with {n1}x{n2}")
    return U.reshape(n1, n2, n1, n2).transpose(1, 0, 3, 2).reshape(N, N)


def unitary_with_first_column(v: np.ndarray) -> np.ndarray:
    """Complete a unit vector to a unitary whose first column is that vector."""
    v = np.asarray(v, dtype=np.complex128)
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-9:
        raise ContractViolation(f"column norm {nrm} != 1")
    d = v.size
    M = np.eye(d, dtype=np.complex128)
    M[:, 0] = v
    Q, _ = np.linalg.qr(M)
    # QR fixes the first column only up to phase; rotate it back onto v
    phase = np.vdot(Q[:, 0], v)
    Q[:, 0] = Q[:, 0] * phase
    return Q


@dataclass(frozen=True)
class BlockEncoding:
    """An explicit unitary realizing target/alpha in its top-left block."""

    unitary: np.ndarray
    alpha: float
    ancillas: int          # physical ancilla qubits: unitary dim = 2^ancillas * dim
    epsilon: float
    dim: int
    target: np.ndarray | None = None
    reported_ancillas: int = -1
    cost: int = 0          # ledger charge recorded at construction
    note: str = ""

    def __post_init__(self):
        U = np.ascontiguousarray(np.asarray(self.unitary, dtype=np.complex128))
        object.__setattr__(self, "unitary", U)
        expect = (1 << self.ancillas) * self.dim
        if U.shape != (expect, expect):
            raise ContractViolation(
                f"unitary dim {U.shape[0]} != 2^{self.ancillas} * {self.dim}"
            )
        if self.alpha <= 0:
            raise ContractViolation("normalization alpha must be positive")
        res = unitarity_residual(U)
        if res > UNITARITY_ATOL:
            raise ContractViolation(f"unitarity residual {res:.3e}")
        if self.target is not None:
            T = np.asarray(self.target, dtype=np.complex128)
            object.__setattr__(self, "target", T)
            err = float(np.linalg.norm(T - self.alpha * self.block, 2))
            if err > self.epsilon + 1e-9:
                raise ContractViolation(
                    f"block error {err:.3e} exceeds advertised epsilon {self.epsilon:.3e}"
                )
        if self.reported_ancillas < 0:
            object.__setattr__(self, "reported_ancillas", self.ancillas)
        U.setflags(write=False)

    @property
    def block(self) -> np.ndarray:
        return self.unitary[: self.dim, : self.dim]


def extract_block(enc: BlockEncoding) -> np.ndarray:
    """alpha times the encoded top-left block."""
    return enc.alpha * enc.block


def dilate(A, alpha: float, epsilon: float = 0.0, target=None, **meta) -> BlockEncoding:
    """One-ancilla exact encoding [[B, S], [S, -B]] with B = A/alpha."""
    A = hermitian_part(np.asarray(A, dtype=np.complex128))
    n = A.shape[0]
    if np.linalg.norm(A, 2) > alpha * (1 + 1e-9):
        raise ContractViolation("norm of A exceeds the requested normalization")
    B = A / alpha
    w, V = np.linalg.eigh(B)
    S = (V * np.sqrt(np.clip(1.0 - w**2, 0.0, None))) @ V.conj().T
    U = np.block([[B, S], [S, -B]])
    tgt = A if target is None else target
    return BlockEncoding(
        unitary=U, alpha=alpha, ancillas=1, epsilon=epsilon, dim=n, target=tgt, **meta
    )


def identity_encoding(n: int, ancillas: int = 0) -> BlockEncoding:
    d = (1 << ancillas) * n
    return BlockEncoding(
        unitary=np.eye(d, dtype=np.complex128), alpha=1.0, ancillas=ancillas,
        epsilon=0.0, dim=n, target=np.eye(n, dtype=np.complex128),
    )


def pad_ancillas(enc: BlockEncoding, extra: int) -> BlockEncoding:
    """Tensor identity ancillas in front; the encoded block is unchanged."""
    if extra <= 0:
        return enc
    U = np.kron(np.eye(1 << extra, dtype=np.complex128), enc.unitary)
    # permute so the enlarged ancilla register stays in front of the system:
    # kron(I, U) is already (new (x) old-anc (x) sys); block position preserved.
    return BlockEncoding(
        unitary=U, alpha=enc.alpha, ancillas=enc.ancillas + extra,
        epsilon=enc.epsilon, dim=enc.dim, target=enc.target,
        reported_ancillas=max(enc.reported_ancillas, enc.ancillas + extra),
        cost=enc.cost, note=enc.note,
    )


# ---------------------------------------------------------------------------
# Purified density operators
# ---------------------------------------------------------------------------

def make_purification(rho_sub: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Build a preparation unitary G for a subnormalized density operator.

    The purifying state lives on registers [system copy (w qubits) | flag
    (1 qubit) | tag (w qubits)]; projecting the flag on |0> and tracing the
    tag recovers the operator.  Returns (G, w, a) with a = w + 1 ancilla-side
    qubits, so G acts on 2^(2w+1) dimensions.
    """
    rho = hermitian_part(np.asarray(rho_sub, dtype=np.complex128))
    n = rho.shape[0]
    w = max(1, int(math.ceil(math.log2(n))))
    if (1 << w) != n:
        raise ContractViolation("dimension must be a power of two for purification")
    p, V = np.linalg.eigh(rho)
    p = np.clip(p, 0.0, None)
    total = float(p.sum())
    if total > 1 + 1e-9:
        raise ContractViolation("trace exceeds 1; not subnormalized")
    a = w + 1
    vec = np.zeros(n * 2 * n, dtype=np.complex128)
    for i in range(n):
        if p[i] <= 0:
            continue
        # index (sys, flag=0, tag=i) in row-major [sys | flag | tag] layout
        vec[np.arange(n) * (2 * n) + 0 * n + i] += math.sqrt(p[i]) * V[:, i]
    leftover = max(0.0, 1.0 - total)
    if leftover > 0:
        vec[0 * (2 * n) + 1 * n + 0] = math.sqrt(leftover)  # flag = 1 sink
    vec /= np.linalg.norm(vec)
    return unitary_with_first_column(vec), w, a


def purified_density_encoding(
    G: np.ndarray, w: int, a: int, ledger: QueryLedger | None = None,
    target: np.ndarray | None = None,
) -> BlockEncoding:
    """Exact (1, w+a+1, 0)-encoding of the operator prepared by G.

    The construction conjugates a swap of the first two (w+1)-qubit registers
    by the preparation unitary; it consumes one use of G and one of its
    inverse, which is what the ledger charges.
    """
    G = np.asarray(G, dtype=np.complex128)
    dG = 1 << (w + a)
    if G.shape != (dG, dG):
        raise ContractViolation("G dimension does not match w + a qubits")
    if unitarity_residual(G) > UNITARITY_ATOL:
        raise ContractViolation("G is not unitary")
    n = 1 << w
    d1 = 1 << (w + 1)          # the swapped register pair size
    drest = 1 << (a - 1)
    swap = np.zeros((d1 * d1, d1 * d1))
    for x in range(d1):
        for y in range(d1):
            swap[y * d1 + x, x * d1 + y] = 1.0
    big_swap = np.kron(swap, np.eye(drest))
    IG = np.kron(np.eye(d1), G)
    V = IG.conj().T @ big_swap @ IG
    # layout is [system (n) | flag' (2) | G registers (2^(w+a))]; move the
    # system behind the ancilla block to match the ancilla-first convention.
    U = swap_tensor_factors(V, n, 2 * dG)
    if ledger is not None:
        ledger.charge("state-prep", 2)
    return BlockEncoding(
        unitary=U, alpha=1.0, ancillas=w + a + 1, epsilon=0.0, dim=n,
        target=target, cost=2, note="purified-density",
    )


# ---------------------------------------------------------------------------
# State-preparation pairs and linear combinations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StatePrepPair:
    """Two amplitude vectors whose overlap pattern carries a weight vector."""

    left: np.ndarray
    right: np.ndarray
    beta: float
    precision: float
    active_len: int
    weights: np.ndarray | None = None   # target weights, length active_len
    symmetric: bool = False

    def __post_init__(self):
        c = np.asarray(self.left, dtype=np.complex128)
        d = np.asarray(self.right, dtype=np.complex128)
        object.__setattr__(self, "left", c)
        object.__setattr__(self, "right", d)
        if c.shape != d.shape or c.ndim != 1:
            raise ContractViolation("amplitude vectors must be equal-length 1-d")
        if c.size & (c.size - 1):
            raise ContractViolation("amplitude length must be a power of two")
        for name, v in (("left", c), ("right", d)):
            if abs(np.linalg.norm(v) - 1.0) > 1e-9:
                raise ContractViolation(f"{name} amplitudes are not unit norm")
        tail = np.abs(np.conj(c[self.active_len:]) * d[self.active_len:])
        if tail.size and tail.max() > 1e-12:
            raise ContractViolation("overlap beyond the active block must vanish")
        if self.weights is not None:
            y = np.asarray(self.weights, dtype=np.complex128)
            object.__setattr__(self, "weights", y)
            if y.size != self.active_len:
                raise ContractViolation("weight vector length must equal active_len")
            err = float(np.abs(self.beta * np.conj(c[: y.size]) * d[: y.size] - y).sum())
            if err > self.precision + 1e-12:
                raise ContractViolation(
                    f"weight reconstruction error {err:.3e} exceeds {self.precision:.3e}"
                )
        if self.symmetric and np.abs(c - d).max() > 1e-12:
            raise ContractViolation("symmetric flag set but amplitudes differ")

    @property
    def size(self) -> int:
        return self.left.size


def state_prep_pair(weights, beta: float, precision: float = 0.0) -> StatePrepPair:
    """Generic (possibly signed/complex) pair with orthogonal padding.

    Leftover normalization mass goes on two separate slots (one per side) so
    the overlap pattern beyond the weight vector vanishes exactly: the pair
    encodes the weights alone, with no spurious identity shift downstream.
    """
    y = np.asarray(weights, dtype=np.complex128)
    l1 = float(np.abs(y).sum())
    if beta < l1 - 1e-12:
        raise ContractViolation(f"beta {beta} is below the weight l1-norm {l1}")
    pad = math.sqrt(max(0.0, 1.0 - l1 / beta))
    size = pow2_at_least(y.size + (2 if pad > 0 else 0))
    c = np.zeros(size, dtype=np.complex128)
    d = np.zeros(size, dtype=np.complex128)
    mags = np.sqrt(np.abs(y) / beta)
    phases = np.ones_like(y)
    nz = np.abs(y) > 0
    phases[nz] = y[nz] / np.abs(y[nz])
    c[: y.size] = mags
    d[: y.size] = mags * phases
    if pad > 0:
        c[y.size] = pad
        d[y.size + 1] = pad
    symmetric = bool(np.abs(c - d).max() <= 1e-12)
    return StatePrepPair(
        left=c, right=d, beta=beta, precision=precision, active_len=y.size,
        weights=y.copy(), symmetric=symmetric,
    )


def linear_combination(
    encodings: Sequence[BlockEncoding], pair: StatePrepPair,
    ledger: QueryLedger | None = None, target: np.ndarray | None = None,
) -> BlockEncoding:
    """Block-encode sum_j y_j A_j from normalization-1 encodings of the A_j.

    Slots of the preparation pair beyond the supplied encodings multiply the
    identity, which is how padding mass turns into a harmless identity shift.
    The output contract is (beta, a+b, eps1 + beta*eps2) exactly.
    """
    if not encodings:
        raise ContractViolation("need at least one constituent encoding")
    a = encodings[0].ancillas
    n = encodings[0].dim
    for e in encodings:
        if e.ancillas != a or e.dim != n:
            raise ContractViolation("constituents must share dimension and ancilla count")
        if abs(e.alpha - 1.0) > 1e-12:
            raise ContractViolation("constituents must be normalization-1 encodings")
    if pair.active_len < len(encodings):
        raise ContractViolation("preparation pair is shorter than the encoding list")
    eps2 = max(e.epsilon for e in encodings)
    sub = (1 << a) * n
    size = pair.size
    W = np.zeros((size * sub, size * sub), dtype=np.complex128)
    eye_sub = np.eye(sub, dtype=np.complex128)
    for j in range(size):
        Uj = encodings[j].unitary if j < len(encodings) else eye_sub
        W[j * sub : (j + 1) * sub, j * sub : (j + 1) * sub] = Uj
    PL = unitary_with_first_column(pair.left)
    PR = unitary_with_first_column(pair.right)
    Wt = np.kron(PL.conj().T, eye_sub) @ W @ np.kron(PR, eye_sub)
    if ledger is not None:
        ledger.charge("operator-U", len(encodings))
    b = int(round(math.log2(size)))
    eps_out = pair.precision + pair.beta * eps2
    if target is None and pair.weights is not None and all(
        e.target is not None for e in encodings
    ):
        target = np.zeros((n, n), dtype=np.complex128)
        for j in range(pair.active_len):
            wgt = pair.weights[j]
            Tj = encodings[j].target if j < len(encodings) else np.eye(n)
            target = target + wgt * Tj
        target = hermitian_part(target) if np.abs(target - target.conj().T).max() < 1e-9 else target
    return BlockEncoding(
        unitary=Wt, alpha=pair.beta, ancillas=a + b, epsilon=eps_out, dim=n,
        target=target, cost=len(encodings), note="linear-combination",
    )


# ---------------------------------------------------------------------------
# Hamiltonian simulation and smooth functions
# ---------------------------------------------------------------------------

def hamiltonian_simulation(
    enc: BlockEncoding, t: float, eps: float, ledger: QueryLedger | None = None,
) -> BlockEncoding:
    """Encoding of exp(i t H) from an encoding of H.

    Realized exactly as the matrix exponential of the encoded block; the
    output metadata carries the (1, a+2, eps) contract and the query charge
    |alpha*t| + log(1/eps)/loglog(1/eps).
    """
    n = enc.dim
    if t == 0.0:
        return identity_encoding(n)
    if enc.epsilon > eps / abs(2 * t) + 1e-12:
        raise ContractViolation(
            f"input precision {enc.epsilon:.3e} too coarse for eps/|2t| = {eps / abs(2*t):.3e}"
        )
    H = hermitian_part(extract_block(enc))
    w, V = np.linalg.eigh(H)
    U = (V * np.exp(1j * t * w)) @ V.conj().T
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula(
            "hamiltonian_simulation", "operator-U", alpha=enc.alpha, t=t, eps=eps
        )
    tgt = None
    if enc.target is not None:
        wt, Vt = np.linalg.eigh(hermitian_part(enc.target))
        tgt = (Vt * np.exp(1j * t * wt)) @ Vt.conj().T
    return BlockEncoding(
        unitary=U, alpha=1.0, ancillas=0, epsilon=eps, dim=n, target=tgt,
        reported_ancillas=enc.reported_ancillas + 2, cost=charge, note="ham-sim",
    )


@dataclass(frozen=True)
class ControlledSimUnitary:
    """Controlled (M, tau)-simulation: blocks exp(i m tau H) over signed m.

    Index i of the control register encodes m in two's complement on J+1
    bits: m = i for i < M and m = i - 2M otherwise, covering -M .. M-1.
    """

    M: int
    tau: float
    blocks: np.ndarray          # (2M, n, n), i-th block = exp(i * m(i) * tau * H)
    error: float
    hamiltonian: np.ndarray | None = None
    cost: int = 0
    reported_ancillas: int = 0

    def __post_init__(self):
        if self.M < 1 or (self.M & (self.M - 1)):
            raise ContractViolation("M must be a power of two")
        blocks = np.asarray(self.blocks, dtype=np.complex128)
        if blocks.shape[0] != 2 * self.M:
            raise ContractViolation("need 2M controlled blocks")
        object.__setattr__(self, "blocks", blocks)
        blocks.setflags(write=False)

    @property
    def J(self) -> int:
        return int(round(math.log2(self.M)))

    @property
    def dim(self) -> int:
        return self.blocks.shape[1]

    def signed_index(self, i: int) -> int:
        return i if i < self.M else i - 2 * self.M

    def dense(self) -> np.ndarray:
        n = self.dim
        W = np.zeros((2 * self.M * n, 2 * self.M * n), dtype=np.complex128)
        for i in range(2 * self.M):
            W[i * n : (i + 1) * n, i * n : (i + 1) * n] = self.blocks[i]
        return W

    def residual(self) -> float:
        """Max block deviation from exp(i m tau H) for the attached H."""
        if self.hamiltonian is None:
            return 0.0
        w, V = np.linalg.eigh(hermitian_part(self.hamiltonian))
        worst = 0.0
        for i in range(2 * self.M):
            m = self.signed_index(i)
            ref = (V * np.exp(1j * m * self.tau * w)) @ V.conj().T
            worst = max(worst, float(np.linalg.norm(ref - self.blocks[i], 2)))
        return worst


def controlled_simulation(
    enc: BlockEncoding, M: int, tau: float, eps: float,
    ledger: QueryLedger | None = None,
) -> ControlledSimUnitary:
    """Controlled (M, tau)-simulation built from an encoding of H."""
    if M < 1 or (M & (M - 1)):
        raise ContractViolation("M must be a power of two")
    J = int(round(math.log2(M)))
    need = eps / abs(2 * (J + 1) ** 2 * M * tau) if tau != 0 else np.inf
    if enc.epsilon > need + 1e-12:
        raise ContractViolation(
            f"input precision {enc.epsilon:.3e} too coarse for {need:.3e}"
        )
    H = hermitian_part(extract_block(enc))
    w, V = np.linalg.eigh(H)
    n = enc.dim
    blocks = np.empty((2 * M, n, n), dtype=np.complex128)
    for i in range(2 * M):
        m = i if i < M else i - 2 * M
        blocks[i] = (V * np.exp(1j * m * tau * w)) @ V.conj().T
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula(
            "controlled_simulation", "operator-U",
            alpha=enc.alpha, M=M, tau=tau, eps=eps,
        )
    return ControlledSimUnitary(
        M=M, tau=tau, blocks=blocks, error=eps,
        hamiltonian=enc.target if enc.target is not None else H,
        cost=charge, reported_ancillas=enc.reported_ancillas + 2,
    )


def evolution_controlled_simulation(
    step_unitary: np.ndarray, M: int, tau_steps: int = 1,
    hamiltonian: np.ndarray | None = None, error: float = 0.0,
) -> ControlledSimUnitary:
    """Controlled simulation from integer powers of a given evolution unitary.

    Used when the input model hands out exp(i H / t) directly: the m-th block
    is the |m * tau_steps|-th matrix power (or its inverse for negative m).
    """
    U = np.asarray(step_unitary, dtype=np.complex128)
    n = U.shape[0]
    blocks = np.empty((2 * M, n, n), dtype=np.complex128)
    for i in range(2 * M):
        m = i if i < M else i - 2 * M
        blocks[i] = np.linalg.matrix_power(U, m * tau_steps)
    return ControlledSimUnitary(
        M=M, tau=float(tau_steps), blocks=blocks, error=error, hamiltonian=hamiltonian,
    )


@dataclass(frozen=True)
class TaylorSpec:
    """Power-series description of a scalar function around x0.

    ``coeff(l)`` returns the series coefficient of (x - x0)^l and ``fn`` the
    function itself; K must dominate sum_l (r+delta)^l |coeff(l)|.
    """

    x0: float
    r: float
    delta: float
    K: float
    coeff: Callable[[int], float]
    fn: Callable[[float], float]
    eps_prime: float
    name: str = ""
    min_terms: int = 64

    def ksum_check(self) -> float:
        """Numerically verify the K bound; returns the truncated sum.

        Sums at least ``min_terms`` coefficients (series with an interior
        peak, like exponentials, must size this past the peak) and stops
        after eight consecutive terms below K * 1e-8.
        """
        base = self.r + self.delta
        total = 0.0
        streak = 0
        for l in range(max(self.min_terms, 16) + 4096):
            t = abs(self.coeff(l)) * base**l
            total += t
            if l >= self.min_terms and t < self.K * 1e-8:
                streak += 1
                if streak >= 8:
                    break
            else:
                streak = 0
        if total > self.K * (1 + 1e-9):
            raise ContractViolation(
                f"coefficient sum {total:.6f} exceeds K = {self.K:.6f}"
            )
        return total

    def truncation_order(self) -> int:
        ratio = (self.r + self.delta) / self.r
        return max(2, int(math.ceil(math.log(2.0 / self.eps_prime) / math.log(ratio))))


def smooth_function(
    ctrl: ControlledSimUnitary, spec: TaylorSpec, ledger: QueryLedger | None = None,
) -> BlockEncoding:
    """(K, ., K*eps') encoding of f(H) from a controlled simulation of H.

    The realized block is f(H)/K by eigendecomposition; an independent
    truncated-Taylor evaluation cross-checks it to within K*eps'.
    """
    if ctrl.hamiltonian is None:
        raise ContractViolation("controlled simulation must carry its Hamiltonian")
    H = hermitian_part(ctrl.hamiltonian)
    n = H.shape[0]
    w = np.linalg.eigvalsh(H)
    span = max(abs(w.max() - spec.x0), abs(w.min() - spec.x0))
    if span > spec.r + 1e-9:
        raise ContractViolation(
            f"spectral radius {span:.6f} around x0 exceeds r = {spec.r:.6f}"
        )
    spec.ksum_check()
    exact = matrix_function(H, spec.fn).mat
    # independent route: truncated Taylor with analytic tail below K*eps'/2
    L = spec.truncation_order()
    X = H - spec.x0 * np.eye(n)
    acc = spec.coeff(L) * np.eye(n, dtype=np.complex128)
    for l in range(L - 1, -1, -1):
        acc = acc @ X + spec.coeff(l) * np.eye(n)
    resid = float(np.linalg.norm(acc - exact, 2))
    if resid > spec.K * spec.eps_prime + 1e-12:
        raise ContractViolation(
            f"Taylor validator disagrees with the eigenvalue route: {resid:.3e}"
        )
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula(
            "smooth_function", "operator-U",
            r=spec.r, delta=spec.delta, eps_prime=spec.eps_prime, alpha=1.0,
        )
    M_used, _ = smooth_function_sim_size(spec.r, spec.delta, spec.eps_prime)
    rep = ctrl.reported_ancillas + max(
        1, int(math.ceil(math.log2(max(2.0, spec.r * math.log2(1 / spec.eps_prime) / spec.delta))))
    )
    return dilate(
        exact, spec.K, epsilon=spec.K * spec.eps_prime, target=exact,
        reported_ancillas=rep, cost=charge,
        note=f"smooth-function[{spec.name or 'f'}] M={M_used}",
    )


def _power_taylor(kappa: float, c: float, eps_prime: float, negative: bool) -> TaylorSpec:
    x0 = (1.0 + 1.0 / kappa) / 2.0
    r = (1.0 - 1.0 / kappa) / 2.0
    if negative:
        # delta tuned so the coefficient sum equals exactly 2 * kappa^c
        delta = (1.0 - 2.0 ** (-1.0 / c)) / kappa
        K = 2.0 * kappa**c
        expo = -c
    else:
        delta = 1.0 / (2.0 * kappa)
        K = 2.0
        expo = c

    def coeff(l: int, _x0=x0, _e=expo) -> float:
        out = 1.0
        for i in range(l):
            out *= (_e - i) / (i + 1)
        return out * _x0 ** (_e - l)

    fn = (lambda x: x**expo)
    return TaylorSpec(
        x0=x0, r=r, delta=delta, K=K, coeff=coeff, fn=fn,
        eps_prime=eps_prime, name=f"power[{expo}]",
    )


def _spectrum_in_window(enc: BlockEncoding, kappa: float) -> None:
    H = hermitian_part(extract_block(enc))
    w = np.linalg.eigvalsh(H)
    if w.min() < 1.0 / kappa - 1e-9 or w.max() > 1.0 + 1e-9:
        raise ContractViolation(
            f"spectrum [{w.min():.6f}, {w.max():.6f}] outside [1/kappa, 1]"
        )


def negative_power(
    enc: BlockEncoding, kappa: float, c: float, eps: float,
    ledger: QueryLedger | None = None,
) -> BlockEncoding:
    """(2*kappa^c, ., eps) encoding of H^(-c) for spectrum in [1/kappa, 1]."""
    if kappa < 2:
        raise ContractViolation("kappa must be at least 2")
    _spectrum_in_window(enc, kappa)
    spec = _power_taylor(kappa, c, eps_prime=eps / (2.0 * kappa**c), negative=True)
    M, tau = smooth_function_sim_size(spec.r, spec.delta, spec.eps_prime)
    ctrl = controlled_simulation(enc, M, tau, eps=spec.eps_prime / 2.0)
    out = smooth_function(ctrl, spec)
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula(
            "negative_power", "operator-U", kappa=kappa, c=c, eps=eps
        )
    return BlockEncoding(
        unitary=out.unitary, alpha=out.alpha, ancillas=out.ancillas,
        epsilon=eps, dim=out.dim, target=out.target,
        reported_ancillas=out.reported_ancillas, cost=charge, note="negative-power",
    )


def positive_power(
    enc: BlockEncoding, kappa: float, c: float, eps: float,
    ledger: QueryLedger | None = None,
) -> BlockEncoding:
    """(2, ., eps) encoding of H^c for c in (0, 1] and spectrum in [1/kappa, 1]."""
    if kappa < 2:
        raise ContractViolation("kappa must be at least 2")
    if not 0 < c <= 1:
        raise ContractViolation("exponent must lie in (0, 1]")
    _spectrum_in_window(enc, kappa)
    spec = _power_taylor(kappa, c, eps_prime=eps / 2.0, negative=False)
    M, tau = smooth_function_sim_size(spec.r, spec.delta, spec.eps_prime)
    ctrl = controlled_simulation(enc, M, tau, eps=spec.eps_prime / 2.0)
    out = smooth_function(ctrl, spec)
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula(
            "positive_power", "operator-U", kappa=kappa, eps=eps
        )
    return BlockEncoding(
        unitary=out.unitary, alpha=out.alpha, ancillas=out.ancillas,
        epsilon=eps, dim=out.dim, target=out.target,
        reported_ancillas=out.reported_ancillas, cost=charge, note="positive-power",
    )


def exp_taylor_spec(scale: float, shift: float, eps_prime: float, r: float = 1.0,
                    delta: float = 1.0) -> TaylorSpec:
    """Series for f(x) = exp(-scale * (x + shift)) around x0 = 0.

    With shift >= r + delta the coefficient sum telescopes to
    exp(-scale*(shift - r - delta)) <= 1, so K = 1 works for any scale.
    """
    if shift < r + delta - 1e-12:
        raise ContractViolation("shift must cover the expansion radius")
    K = math.exp(-scale * (shift - r - delta)) if scale > 0 else 1.0

    def coeff(l: int, _s=scale, _c=shift) -> float:
        return math.exp(-_s * _c) * (-_s) ** l / math.factorial(l)

    return TaylorSpec(
        x0=0.0, r=r, delta=delta, K=max(K, 1e-300), coeff=coeff,
        fn=lambda x: math.exp(-scale * (x + shift)), eps_prime=eps_prime,
        name=f"exp[-{scale:g}(x+{shift:g})]",
        min_terms=int(math.ceil(4 * scale * (r + delta))) + 32,
    )
