"""Biased two-outcome trace estimator and its k-fold averaged form.

A single sample measures the square-root landing of I/2 + A/4 on the state
and reports 14 on acceptance, -2 otherwise, so the expectation is
16p - 2 = Tr(A rho) up to the encoding bias and the exact variance is
256 p (1 - p).  Averages over large k are emulated distributionally: an
exact binomial draw for the success count, switching to its normal limit
above a size cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockenc import dilate, positive_power
from .errors import ContractViolation
from .ledger import QueryLedger, cost_trace_mean_k
from .linalg import hermitian_part

BINOMIAL_EXACT_CUTOFF = 100_000


@dataclass(frozen=True)
class TraceEstimator:
    """Cached acceptance operator for one target matrix."""

    landing: np.ndarray     # ~ sqrt(I/2 + A/4) / 2, the accepted block
    theta: float
    alpha: float            # input-encoding normalization, drives the charge

    def probability(self, rho) -> float:
        rho = np.asarray(rho, dtype=np.complex128)
        B = self.landing
        return float(np.trace(B @ B.conj().T @ rho).real)


def build_trace_estimator(A, theta: float = 1e-6, alpha: float = 1.0) -> TraceEstimator:
    """Assemble the estimator for -I <= A <= I through the power encoding.

    Accepts either the matrix or a block-encoding of it; an encoding's
    normalization becomes the per-sample query charge.
    """
    from .blockenc import BlockEncoding, extract_block

    if isinstance(A, BlockEncoding):
        alpha = A.alpha
        A = extract_block(A)
    A = hermitian_part(np.asarray(A, dtype=np.complex128))
    w = np.linalg.eigvalsh(A)
    if w.min() < -1 - 1e-9 or w.max() > 1 + 1e-9:
        raise ContractViolation("estimator requires -I <= A <= I")
    n = A.shape[0]
    shifted = hermitian_part(np.eye(n) / 2.0 + A / 4.0)
    enc = positive_power(dilate(shifted, 1.0, target=shifted), kappa=4.0, c=0.5,
                         eps=theta / 16.0)
    return TraceEstimator(landing=np.ascontiguousarray(enc.block), theta=theta,
                          alpha=alpha)


def trace_estimator_sample(
    est: TraceEstimator, rho, rng: np.random.Generator,
    ledger: QueryLedger | None = None,
) -> float:
    """One draw from {14, -2} with acceptance probability p = Tr(B^2 rho)."""
    p = est.probability(rho)
    if ledger is not None:
        ledger.charge_formula("trace_estimator", "trace-est", alpha=est.alpha)
    return 14.0 if rng.random() < p else -2.0


def estimator_mean(p: float) -> float:
    return 16.0 * p - 2.0


def estimator_variance(p: float) -> float:
    """Exact variance of one draw: 256 p (1 - p)."""
    return 256.0 * p * (1.0 - p)


def averaged_estimate(
    p: float, k: int, rng: np.random.Generator, exact_cutoff: int = BINOMIAL_EXACT_CUTOFF,
) -> float:
    """Average of k independent draws, emulated through the success count.

    The count is binomial(k, p); beyond the cutoff its normal limit is used
    (matching mean and variance; the distributional gap is O(1/sqrt(k))).
    """
    if k < 1:
        raise ContractViolation("k must be positive")
    p = min(max(p, 0.0), 1.0)
    if k <= exact_cutoff:
        successes = float(rng.binomial(k, p))
    else:
        mean = k * p
        successes = rng.normal(mean, math.sqrt(max(k * p * (1.0 - p), 0.0)))
        successes = min(max(successes, 0.0), float(k))
    return 16.0 * successes / k - 2.0


def trace_mean_estimate(
    est: TraceEstimator,
    gibbs_prep,
    k: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    gibbs_cost: int = 1,
) -> float:
    """k-fold averaged estimate on fresh Gibbs copies.

    ``gibbs_prep`` supplies the state (a callable or a fixed density matrix);
    the ledger is charged k preparations and k estimator calls.  With
    k >= 6*(4*sigma*gamma)^2 the average is within gamma^-1/2 of the mean
    with probability at least 5/6 by Chebyshev.
    """
    rho = gibbs_prep() if callable(gibbs_prep) else gibbs_prep
    p = est.probability(rho)
    if ledger is not None:
        ledger.charge("gibbs-prep", k * gibbs_cost)
        ledger.charge("trace-est", k * max(1, int(math.ceil(est.alpha))))
    return averaged_estimate(p, k, rng)


def required_sample_count(gamma: float, sigma: float = 6.0) -> int:
    return cost_trace_mean_k(gamma, sigma)
