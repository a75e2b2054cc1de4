"""Two-phase search and minimum finding, simulated.

The two-phase pattern separates expensive state preparation from cheap
per-index tests, so the sample and test-application budgets are charged
separately.  In simulation the per-index acceptance probabilities are
computed exactly; randomness only picks among qualifying indices, so the
promise structure holds deterministically.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation
from .ledger import QueryLedger, minfind_rounds


def two_phase_search_sim(
    probabilities,
    nu: float,
    rng: np.random.Generator | None = None,
    ledger: QueryLedger | None = None,
) -> int | None:
    """Find an index with acceptance probability >= 1/3, or report none.

    If some p_j >= 2/3 an index with p_j >= 1/3 is always returned; if all
    p_j < 2/3 the answer may be None or any index with p_j >= 1/3.  Charges
    log^4(m) * log(1/nu) state samples and sqrt(m) * log(1/nu) applications.
    """
    p = np.asarray(probabilities, dtype=np.float64)
    if p.size == 0:
        return None
    if p.min() < -1e-12 or p.max() > 1 + 1e-12:
        raise ContractViolation("probabilities must lie in [0, 1]")
    m = p.size
    if ledger is not None:
        ledger.charge_formula("two_phase_search_samples", "gibbs-prep", m=m, nu=nu)
        ledger.charge_formula("two_phase_search_apps", "reflection", m=m, nu=nu)
    strong = np.flatnonzero(p >= 2.0 / 3.0)
    qualifying = np.flatnonzero(p >= 1.0 / 3.0)
    if strong.size == 0 and qualifying.size == 0:
        return None
    if strong.size == 0:
        # weak-promise region: either verdict is allowed; surface a qualifier
        pool = qualifying
    else:
        pool = qualifying
    if rng is None:
        return int(pool[0])
    return int(pool[rng.integers(0, pool.size)])


def two_phase_min_find_sim(
    values,
    error_bars,
    delta: float,
    M: float,
    nu_prime: float,
    rng: np.random.Generator | None = None,
    ledger: QueryLedger | None = None,
) -> int:
    """Index j with a_j - eta_j <= min_i (a_i + eta_i) + delta.

    Binary search on the threshold value, each round testing the predicate
    a_i + eta_i <= v through the two-phase search; the last found index is
    returned.  Charges log^4(m) * log(2M/delta) * log(1/nu') samples.
    """
    a = np.asarray(values, dtype=np.float64)
    eta = np.broadcast_to(np.asarray(error_bars, dtype=np.float64), a.shape)
    if a.size == 0:
        raise ContractViolation("minimum finding over an empty index set")
    if float((np.abs(a) + np.abs(eta)).min()) > M + 1e-12:
        raise ContractViolation("M does not bound the smallest |a_j| + |eta_j|")
    m = a.size
    rounds = minfind_rounds(M, delta)
    nu_round = nu_prime / rounds
    if ledger is not None:
        ledger.charge_formula(
            "two_phase_minfind_samples", "gibbs-prep", m=m, M=M, delta=delta, nu=nu_prime
        )
        ledger.charge_formula(
            "two_phase_minfind_apps", "reflection", m=m, M=M, delta=delta, nu=nu_prime
        )
    upper = a + eta
    lo, hi = -float(M), float(M)
    best: int | None = None
    for _ in range(rounds):
        v = (lo + hi) / 2.0
        hit = two_phase_search_sim((upper <= v).astype(float), nu_round, rng=rng)
        if hit is not None:
            best = hit
            hi = v
        else:
            lo = v
    if best is None:
        best = int(np.argmin(upper))
    if not a[best] - eta[best] <= float(upper.min()) + delta + 1e-12:
        raise ContractViolation("minimum finding violated its output inequality")
    return int(best)
