"""Gibbs-state preparation paths.

``gibbs_exact`` is the eigendecomposition reference that every sampler is
measured against in trace distance.  The operator-model sampler assembles the
weighted constraint sum through a state-preparation pair and a linear
combination of encodings, then lands a bounded exponential map on the
maximally mixed state.  The difference-of-states sampler splits the spectrum
at a cut q, flattens the high subspace, exponentiates both parts at the
quoted normalizations, mixes and renormalizes.  Amplification and estimation
are emulated by exact renormalization / exact probability readout at the
quoted query charge; purified registers are materialized only in the encoding
tests, so samplers hand back the (subnormalized) operator plus a charge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockenc import (
    BlockEncoding,
    controlled_simulation,
    dilate,
    exp_taylor_spec,
    extract_block,
    negative_power,
    smooth_function,
)
from .errors import ContractViolation, SeedExhaustion
from .ledger import QueryLedger, smooth_function_sim_size
from .linalg import (
    DensityOperator,
    Projector,
    hermitian_part,
    matrix_function,
    trace_distance,
)
from .oracles import OperatorOracle, StateDecomposition
from .vecstore import SparseVectorTree


def gibbs_exact(y, matrices) -> DensityOperator:
    """exp(-sum_j y_j A_j) normalized; the reference for every sampler."""
    y = np.asarray(y, dtype=np.float64)
    H = np.zeros(matrices[0].shape, dtype=np.complex128)
    for yj, Aj in zip(y, matrices):
        if yj != 0.0:
            H = H + yj * np.asarray(Aj)
    from .linalg import gibbs_state

    return gibbs_state(H)


@dataclass(frozen=True)
class GibbsRequest:
    """Solver-facing bundle: weight store, norm bounds, precision, seed."""

    store: SparseVectorTree
    K: float
    d: int
    theta: float
    seed: int = 0

    def __post_init__(self):
        if self.K < self.store.root - 1e-9:
            raise ContractViolation("K must bound the stored l1-norm")
        if not 0 < self.theta <= 1:
            raise ContractViolation("theta must lie in (0, 1]")


def gibbs_operator_model(
    oracle: OperatorOracle,
    y,
    theta: float | None = None,
    K: float | None = None,
    ledger: QueryLedger | None = None,
) -> tuple[DensityOperator, int]:
    """Gibbs state from shared-normalization encodings of the terms.

    The weighted sum is assembled as a linear combination of encodings driven
    by a symmetric preparation pair, a decaying exponential map is applied to
    the maximally mixed state, and the exact renormalization stands in for
    amplitude amplification.  Charged at alpha * K * sqrt(n) preparation cost.
    """
    if isinstance(y, GibbsRequest):
        theta = y.theta if theta is None else theta
        K = y.K if K is None else K
        y = y.store
    if theta is None:
        raise ContractViolation("a precision target theta is required")
    if isinstance(y, SparseVectorTree):
        weights = y.to_array()
        pair_from_tree = y
    else:
        weights = np.asarray(y, dtype=np.float64)
        pair_from_tree = None
    if weights.min() < 0:
        raise ContractViolation("weights must be nonnegative")
    n = oracle.encodings[0].dim
    K_bound = float(K if K is not None else max(weights.sum(), 1.0))
    ledger = ledger if ledger is not None else oracle.ledger
    charge = ledger.charge_formula(
        "gibbs_operator", "gibbs-prep", alpha=oracle.alpha, K=K_bound, n=n
    )
    root = float(weights.sum())
    if root == 0.0:
        return DensityOperator(np.eye(n) / n, normalized=True), charge

    if pair_from_tree is not None:
        pair = pair_from_tree.prep_pair(beta=root)
    else:
        from .blockenc import state_prep_pair

        pair = state_prep_pair(weights, beta=root)
    used = min(len(oracle.encodings), int(np.flatnonzero(weights).max()) + 1)
    ones = [
        BlockEncoding(
            unitary=e.unitary, alpha=1.0, ancillas=e.ancillas, epsilon=e.epsilon,
            dim=e.dim, target=(e.target / oracle.alpha) if e.target is not None else None,
            reported_ancillas=e.reported_ancillas,
        )
        for e in (oracle.encoding(j) for j in range(used))
    ]
    from .blockenc import linear_combination

    lcu = linear_combination(ones, pair)
    scale = oracle.alpha * pair.beta          # exp(-H_y) = exp(-scale * H_norm)
    hnorm = hermitian_part(extract_block(lcu) / pair.beta)
    base = BlockEncoding(
        unitary=lcu.unitary, alpha=1.0, ancillas=lcu.ancillas,
        epsilon=lcu.epsilon / pair.beta, dim=n, target=hnorm,
    )
    eps_prime = theta / 8.0
    spec = exp_taylor_spec(scale=scale / 2.0, shift=2.0, eps_prime=eps_prime)
    M, tau = smooth_function_sim_size(spec.r, spec.delta, eps_prime)
    need = eps_prime / (2.0 * (math.log2(M) + 1) ** 2 * M * tau)
    if base.epsilon > need:
        raise ContractViolation(
            "stored-weight precision too coarse for the requested theta"
        )
    ctrl = controlled_simulation(base, M, tau, eps=eps_prime / 2.0)
    mapped = smooth_function(ctrl, spec)
    B = mapped.alpha * mapped.block           # exp(-scale*(H_norm + 2I)/2)
    sub = hermitian_part(B @ (np.eye(n) / n) @ B.conj().T)
    rho = hermitian_part(sub / np.trace(sub).real)
    out = DensityOperator(rho, normalized=True)
    ref = gibbs_exact_from_normalized(hnorm, scale)
    dist = trace_distance(out, ref)
    if dist > theta:
        raise ContractViolation(f"sampler missed its precision: {dist:.3e} > {theta}")
    return out, charge


def gibbs_exact_from_normalized(hnorm: np.ndarray, scale: float) -> DensityOperator:
    from .linalg import gibbs_state

    return gibbs_state(scale * hnorm)


@dataclass(frozen=True)
class SubnormalizedGibbsPart:
    """A spectral-window piece of an unnormalized Gibbs operator."""

    part: np.ndarray
    subspace: Projector
    scale: float

    def __post_init__(self):
        part = hermitian_part(self.part)
        object.__setattr__(self, "part", part)
        P = self.subspace.mat
        leak = float(np.linalg.norm(part - P @ part @ P, 2))
        if leak > 1e-9:
            raise ContractViolation(f"part leaks off its subspace by {leak:.3e}")
        if np.trace(part).real > 1 + 1e-9:
            raise ContractViolation("part trace exceeds 1")

    @property
    def trace(self) -> float:
        return float(np.trace(self.part).real)


def project_uniform(
    rho_tilde,
    proj: Projector,
    q: float,
    nu: float,
    ledger: QueryLedger | None = None,
    exact_reference: np.ndarray | None = None,
) -> SubnormalizedGibbsPart:
    """Flatten a state supported on a projector into (q/4) times the projector.

    Applies the inverse-square-root map at normalization sqrt(q)/2, realized
    through the negative-power encoding; the deviation from (q/4)*proj is at
    most 8 * nu / q when the input is 4*nu-close to a state dominating q*proj.
    """
    rho_t = hermitian_part(np.asarray(rho_tilde, dtype=np.complex128))
    P = proj.mat
    n = P.shape[0]
    leak = float(np.linalg.norm(rho_t - P @ rho_t @ P, 2))
    if leak > max(4 * nu, 1e-9):
        raise ContractViolation(f"input leaks off the subspace by {leak:.3e}")
    ref = rho_t if exact_reference is None else hermitian_part(exact_reference)
    restricted = P @ ref @ P
    low = np.linalg.eigvalsh(restricted - q * P)
    if low[0] < -max(4 * nu, 1e-9):
        raise ContractViolation(
            f"q * proj is not dominated on the image (margin {low[0]:.3e})"
        )
    # floor the spectrum into the negative-power window [1/kappa, 1]
    kappa = max(2.0, 2.0 / q)
    floored = hermitian_part(
        matrix_function(rho_t + (np.eye(n) - P), lambda x: min(max(x, 1.0 / kappa), 1.0)).mat
    )
    enc = negative_power(dilate(floored, 1.0, target=floored), kappa=kappa, c=0.5,
                         eps=min(nu, 1e-6) if nu > 0 else 1e-9)
    inv_root = extract_block(enc)             # ~ floored^(-1/2)
    V = (math.sqrt(q) / 2.0) * hermitian_part(P @ inv_root @ P)
    out = hermitian_part(V @ rho_t @ V.conj().T)
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula("project_uniform", "state-prep", q=q)
    dev = 0.5 * float(np.abs(np.linalg.eigvalsh(out - (q / 4.0) * P)).sum())
    if nu == 0 and dev > 1e-8:
        raise ContractViolation(f"exact input should flatten exactly, got {dev:.3e}")
    if dev > 8.0 * max(nu, 1e-12) / q + 1e-8:
        raise ContractViolation(f"flattening error {dev:.3e} exceeds 8*nu/q")
    return SubnormalizedGibbsPart(part=out, subspace=proj, scale=q / 4.0)


def _threshold_labels(
    eigvals: np.ndarray, q: float, eta: float,
    mislabel_prob: float = 0.0, rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Boolean high-side labels; eigenvalues inside the eta window may flip.

    Under the separation precondition no eigenvalue sits inside the window,
    so the injected labeling error never fires outside negative tests.
    """
    labels = eigvals > q
    if mislabel_prob > 0.0 and rng is not None:
        near = np.abs(eigvals - q) < eta
        flips = near & (rng.random(eigvals.size) < mislabel_prob)
        labels = labels ^ flips
    return labels


def gibbs_state_model(
    plus,
    minus,
    beta: float,
    q: float,
    eta: float,
    delta: float,
    ledger: QueryLedger | None = None,
    mislabel_rng: np.random.Generator | None = None,
    check_separation: bool = True,
) -> tuple[DensityOperator, dict]:
    """Gibbs state exp(beta*H)/Tr for H = (plus - minus)/2, split at cut q.

    Runs the full staged procedure: threshold labeling, emptiness dichotomy,
    binary search for the top eigenvalue, subspace flattening, bounded
    exponential maps on both spectral windows at the quoted normalizations,
    mixing with coefficients <= 1/2, and exact renormalization in place of
    amplitude amplification.  Total charge q^-1.5 / eta.
    """
    rp = hermitian_part(np.asarray(plus, dtype=np.complex128))
    rm = hermitian_part(np.asarray(minus, dtype=np.complex128))
    n = rp.shape[0]
    H = hermitian_part((rp - rm) / 2.0)
    if not 1.0 <= beta <= n / 2.0 + 1e-12:
        raise ContractViolation(f"beta {beta} outside [1, n/2]")
    if not 0.0 < q <= 1.0 / beta + 1e-12:
        raise ContractViolation(f"cut {q} outside (0, 1/beta]")
    # below 2/n the low-subspace mass floor is no longer guaranteed; the
    # procedure itself still goes through, so the edge is informational
    in_window = q >= 2.0 / n - 1e-12
    if not 0 < delta <= 1:
        raise ContractViolation("delta must lie in (0, 1]")
    w = np.linalg.eigvalsh(H)
    gap = float(np.abs(w - q).min())
    if check_separation and gap < eta:
        raise ContractViolation(
            f"cut {q} is {gap:.3e}-close to the spectrum; need eta = {eta:.3e}"
        )
    delta_prime = delta * q * q / 64.0
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula("gibbs_state_model", "state-prep", q=q, eta=eta)
    info: dict = {"q": q, "eta": eta, "delta_prime": delta_prime, "charge": charge,
                  "in_window": in_window}

    # (i) threshold labeling (exact under the separation precondition)
    labels = _threshold_labels(w, q, eta, mislabel_prob=delta_prime if mislabel_rng else 0.0,
                               rng=mislabel_rng)
    wH, V = np.linalg.eigh(H)
    Vh = V[:, labels]
    proj_high = Projector(Vh @ Vh.conj().T, rank=int(labels.sum()))
    proj_low = Projector(np.eye(n) - proj_high.mat, rank=n - proj_high.rank)

    # (ii) emptiness dichotomy on the masked average state
    avg = hermitian_part((rp + rm) / 2.0)
    masked = hermitian_part(proj_high.mat @ avg @ proj_high.mat)
    masked_tr = float(np.trace(masked).real)
    high_empty = masked_tr <= q / 4.0
    if not high_empty and masked_tr < 3.0 * q / 4.0 - 1e-12:
        # outside the promised dichotomy; only reachable with injected errors
        high_empty = proj_high.rank == 0
    info["masked_trace"] = masked_tr
    info["high_empty"] = high_empty

    parts: list[np.ndarray] = []
    coeffs: list[float] = []
    if not high_empty:
        # (iii) binary search for the top eigenvalue, precision 1/(2 beta)
        lo, hi = q, 1.0
        lam_max = float(wH.max())
        for _ in range(max(1, math.ceil(math.log2(2.0 * beta)))):
            mid = (lo + hi) / 2.0
            if lam_max >= mid:
                lo = mid
            else:
                hi = mid
        lam_tilde = hi
        if not (lam_tilde + 1e-12 >= lam_max and lam_tilde - 1.0 / beta < lam_max):
            raise ContractViolation("binary search violated its bracketing guarantee")
        info["lam_tilde"] = lam_tilde

        # (iv) flatten the high window, then the shifted exponential map
        flat = project_uniform(masked, proj_high, q, nu=delta_prime,
                               exact_reference=masked)
        half_exp_high = matrix_function(
            H, lambda x: math.exp(beta * (min(x, lam_tilde) - lam_tilde) / 2.0) / 2.0
        ).mat
        high_part = hermitian_part(half_exp_high @ flat.part @ half_exp_high.conj().T)
        high_scale = q * math.exp(-beta * lam_tilde) / 16.0
        tr_high = float(np.trace(high_part).real)
        if tr_high < q / (16.0 * math.e) - 1e-9:
            raise ContractViolation(
                f"high-window mass {tr_high:.3e} below the q/(16e) floor"
            )
        parts.append(high_part)
        coeffs.append(high_scale)
        info["high_trace"] = tr_high
    else:
        lam_tilde = None

    # (v) low window from the maximally mixed state
    low_state = proj_low.mat / n
    half_exp_low = matrix_function(
        H, lambda x: math.exp(beta * x / 2.0) / (2.0 * math.sqrt(math.e))
    ).mat
    low_part = hermitian_part(half_exp_low @ low_state @ half_exp_low.conj().T)
    low_scale = 1.0 / (4.0 * math.e * n)
    tr_low = float(np.trace(low_part).real)
    if in_window and tr_low < 1.0 / (8.0 * math.e**2) - 1e-9:
        raise ContractViolation(f"low-window mass {tr_low:.3e} below the 1/(8e^2) floor")
    parts.append(low_part)
    coeffs.append(low_scale)
    info["low_trace"] = tr_low

    # (vi) mix with coefficients at most 1/2 relative to xi
    xi = min(coeffs) if lam_tilde is not None else low_scale
    info["xi"] = xi
    mixture = np.zeros((n, n), dtype=np.complex128)
    for part, scale in zip(parts, coeffs):
        weight = xi / (2.0 * scale)
        if weight > 0.5 + 1e-12:
            raise ContractViolation("mixing coefficient exceeded 1/2")
        mixture = mixture + weight * part

    # (vii) renormalize (amplitude amplification emulated exactly)
    total = float(np.trace(mixture).real)
    rho = hermitian_part(mixture / total)
    out = DensityOperator(rho, normalized=True)
    ref = matrix_function(H, lambda x: math.exp(beta * x)).mat
    ref = DensityOperator(hermitian_part(ref / np.trace(ref).real), normalized=True)
    dist = trace_distance(out, ref)
    info["trace_distance"] = dist
    if mislabel_rng is None and dist > delta:
        raise ContractViolation(f"output missed its precision: {dist:.3e} > {delta}")
    return out, info


def seed_width_bits(beta: float, delta: float) -> int:
    """Seed width for the exhaustive grid: ceil(log2(16 beta / delta))."""
    return max(1, math.ceil(math.log2(16.0 * max(beta, 1.0) / delta)))


def gibbs_state_model_seeded(
    plus,
    minus,
    beta: float,
    theta: float,
    delta: float,
    seed: int,
    ledger: QueryLedger | None = None,
) -> tuple[DensityOperator | None, dict]:
    """Seeded sampler for exp(-beta*H)/Tr with H = (plus - minus)/2.

    The seed picks a spectral cut uniformly from [1/(2 beta), 1/beta]; cuts
    that land eta-close to the spectrum of |H| are flagged as failed seeds
    (returning None), never silently wrong output.  At least a (1 - delta)
    fraction of seeds succeed.  Charge beta^3.5 / delta.
    """
    rp = hermitian_part(np.asarray(plus, dtype=np.complex128))
    rm = hermitian_part(np.asarray(minus, dtype=np.complex128))
    n = rp.shape[0]
    if beta < 1:
        raise ContractViolation("beta must be at least 1")
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula("gibbs_seeded", "state-prep", beta=beta, delta=delta)
    info: dict = {"charge": charge, "beta": beta}

    H = hermitian_part((rp - rm) / 2.0)
    if beta > n / 4.0:
        # the drawn-cut interval would leave the difference sampler's window;
        # fall back to the linear-combination sampler (exact emulation)
        from .linalg import gibbs_state

        info["path"] = "operator-fallback"
        out = gibbs_state(beta * H)
        return out, info

    bits = seed_width_bits(beta, delta)
    if not 0 <= seed < (1 << bits):
        raise ContractViolation(f"seed must fit in {bits} bits")
    lo, hi = 1.0 / (2.0 * beta), 1.0 / beta
    q = lo + (seed + 0.5) / (1 << bits) * (hi - lo)
    eta = delta / (8.0 * beta * beta)
    absw = np.abs(np.linalg.eigvalsh(H))
    gap = float(np.abs(absw - q).min())
    info.update({"path": "difference-sampler", "q": q, "eta": eta, "gap": gap,
                 "seed_bits": bits})
    if gap < eta:
        info["seed_failed"] = True
        return None, info
    info["seed_failed"] = False
    # the difference sampler targets exp(+beta H); swap the states to negate
    out, sub_info = gibbs_state_model(rm, rp, beta=beta, q=q, eta=eta, delta=theta)
    info["stages"] = sub_info
    return out, info


def gibbs_state_decomposition(
    decomp: StateDecomposition,
    nu_plus: SparseVectorTree,
    nu_minus: SparseVectorTree,
    K: float,
    theta: float,
    seed: int = 0,
    ledger: QueryLedger | None = None,
    max_seed_tries: int = 64,
) -> tuple[DensityOperator, dict]:
    """Gibbs state of the weighted decomposition via the seeded sampler.

    The stored vectors hold y_j * (plus/minus weights); identity terms are
    dropped since they cancel out of the Gibbs map.  The assembled mixtures
    feed the seeded sampler at inverse temperature 2*K*B (the factor 2
    converts the half-difference normalization), failure budget 1/5.
    """
    B = decomp.norm_bound
    n = decomp.dim
    yp = nu_plus.to_array()
    ym = nu_minus.to_array()
    charge = 0
    if ledger is not None:
        charge = ledger.charge_formula("gibbs_decomposition", "state-prep", B=B, K=K)
    info: dict = {"charge": charge, "beta": 2.0 * K * B}
    mix_p = np.zeros((n, n), dtype=np.complex128)
    mix_m = np.zeros((n, n), dtype=np.complex128)
    for j in range(decomp.count):
        if yp[j]:
            mix_p = mix_p + (yp[j] / (K * B)) * decomp.plus_state[j]
        if ym[j]:
            mix_m = mix_m + (ym[j] / (K * B)) * decomp.minus_state[j]
    beta = 2.0 * K * B
    delta = 1.0 / 5.0
    if beta < 1.0:
        from .linalg import gibbs_state

        H = hermitian_part((mix_p - mix_m) / 2.0)
        info["path"] = "small-beta-exact"
        return gibbs_state(beta * H), info
    rng = np.random.default_rng(seed)
    bits = seed_width_bits(beta, delta)
    for attempt in range(max_seed_tries):
        s = int(rng.integers(0, 1 << bits))
        out, sub = gibbs_state_model_seeded(
            mix_p, mix_m, beta=beta, theta=theta, delta=delta, seed=s
        )
        if out is not None:
            info["seed"] = s
            info["attempts"] = attempt + 1
            info["stages"] = sub
            return out, info
    raise SeedExhaustion(f"no viable seed after {max_seed_tries} draws")
