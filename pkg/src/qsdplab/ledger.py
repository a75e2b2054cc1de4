"""Query-cost accounting.

Every simulated oracle call lands on exactly one named counter, and every
composite routine charges the value of a registered closed-form cost formula.
The formulas realize the asymptotic bounds with fixed conventions so that the
accounting is deterministic and auditable:

* ``log`` means log base 2, clamped below at 1;
* every hidden polylog factor is fixed to 1;
* every O(.) constant is fixed to 1 unless stated otherwise in the formula's
  docstring;
* fractional costs are rounded up.

Two known oddities are reproduced rather than resolved: the Gibbs-sampler cost
is quoted with a factor 4 in its precision slot (``T_gibbs(K, d, 4*theta)``),
and the sampling estimator's k-draw count uses the sigma = 6 convention even
though the exact worst-case variance 256*p*(1-p) can reach 39 at p = 3/16.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass

COUNTERS = (
    "sparse-index",
    "sparse-entry",
    "b-vector",
    "mu",
    "state-prep",
    "operator-U",
    "hamiltonian",
    "gibbs-prep",
    "trace-est",
    "reflection",
    "tau-sample",
)


def _log2(x: float) -> float:
    """log2 clamped below at 1 so degenerate arguments never zero out a cost."""
    return max(1.0, math.log2(max(x, 2.0)))


def _ceil(x: float) -> int:
    return int(math.ceil(x - 1e-12))


def pow2_at_least(x: float) -> int:
    """Smallest power of two >= max(x, 1)."""
    return 1 << max(0, math.ceil(math.log2(max(x, 1.0))))


# ---------------------------------------------------------------------------
# Registered cost formulas.  Each returns an exact integer query count.
# ---------------------------------------------------------------------------

def cost_sparse_to_block() -> int:
    """Sparse access to one block-encoding: one index query plus one entry query."""
    return 2


def cost_state_to_block() -> int:
    """State-model block-encoding: one use each of G+, G- and their inverses."""
    return 4


def cost_hamiltonian_to_block(eps: float) -> int:
    """Evolution queries for one operator-model access built from time evolution."""
    return _ceil(_log2(1.0 / eps))


def cost_hamiltonian_simulation(alpha: float, t: float, eps: float) -> int:
    """|alpha*t| + log(1/eps)/loglog(1/eps) constituent queries."""
    lg = _log2(1.0 / eps)
    return _ceil(abs(alpha * t)) + _ceil(lg / max(1.0, math.log2(lg) if lg > 2 else 1.0))


def cost_controlled_simulation(alpha: float, M: int, tau: float, eps: float) -> int:
    """|alpha*M*tau| + J*log(J/eps)/loglog(J/eps) for M = 2^J."""
    J = max(1, int(round(math.log2(max(M, 1)))))
    lg = _log2(J / eps)
    return _ceil(abs(alpha) * M * abs(tau)) + _ceil(J * lg / max(1.0, math.log2(lg) if lg > 2 else 1.0))


def smooth_function_sim_size(r: float, delta: float, eps_prime: float) -> tuple[int, float]:
    """(M, tau) of the controlled simulation consumed by a smooth-function call."""
    M = pow2_at_least(r * _log2(1.0 / eps_prime) / delta)
    tau = math.pi / (2.0 * (r + delta))
    return M, tau


def cost_smooth_function(r: float, delta: float, eps_prime: float, alpha: float = 1.0) -> int:
    """One use of a controlled (M, tau)-simulation sized for the Taylor series."""
    M, tau = smooth_function_sim_size(r, delta, eps_prime)
    return cost_controlled_simulation(alpha, M, tau, eps_prime / 2.0)


def cost_negative_power(kappa: float, c: float, eps: float) -> int:
    """kappa * max(1, c) * log(kappa^c / eps) simulation queries."""
    return _ceil(kappa * max(1.0, c) * _log2(kappa**c / eps))


def cost_positive_power(kappa: float, eps: float) -> int:
    """kappa * log(1/eps) simulation queries."""
    return _ceil(kappa * _log2(1.0 / eps))


def cost_trace_estimator(alpha: float) -> int:
    """One trace-estimator sample costs alpha input queries (sigma = 6 convention)."""
    return _ceil(max(alpha, 1.0))


def cost_gibbs_operator(alpha: float, K: float, n: int) -> int:
    """Operator-model Gibbs preparation: alpha * K * sqrt(n)."""
    return _ceil(max(alpha, 1.0) * max(K, 1.0) * math.sqrt(n))


def cost_project_uniform(q: float) -> int:
    """Subspace-flattening map: 1/q preparation queries."""
    return _ceil(1.0 / q)


def cost_gibbs_state_model(q: float, eta: float) -> int:
    """Difference-of-states Gibbs preparation: q^-1.5 / eta."""
    return _ceil(q**-1.5 / eta)


def cost_gibbs_seeded(beta: float, delta: float) -> int:
    """Seeded state-model Gibbs preparation: beta^3.5 / delta."""
    return _ceil(max(beta, 1.0) ** 3.5 / delta)


def cost_gibbs_decomposition(B: float, K: float) -> int:
    """Stored-decomposition Gibbs preparation: (B*K)^3.5 with the delta = 1/5 factor."""
    return _ceil(5.0 * max(B * K, 1.0) ** 3.5)


def cost_two_phase_search_samples(m: int, nu: float) -> int:
    """State samples for one two-phase search: log^4(m) * log(1/nu)."""
    return _ceil(_log2(m) ** 4 * _log2(1.0 / nu))


def cost_two_phase_search_apps(m: int, nu: float) -> int:
    """Test-unitary applications for one two-phase search: sqrt(m) * log(1/nu)."""
    return _ceil(math.sqrt(m) * _log2(1.0 / nu))


def minfind_rounds(M: float, delta: float) -> int:
    """Binary-search rounds over [-M, M] at resolution delta."""
    return max(1, _ceil(math.log2(2.0 * M / delta)))


def cost_two_phase_minfind_samples(m: int, M: float, delta: float, nu: float) -> int:
    """State samples for minimum finding: one search per bisection round."""
    rounds = minfind_rounds(M, delta)
    return rounds * cost_two_phase_search_samples(m, nu / rounds)


def cost_two_phase_minfind_apps(m: int, M: float, delta: float, nu: float) -> int:
    """Test applications for minimum finding: one search per bisection round."""
    rounds = minfind_rounds(M, delta)
    return rounds * cost_two_phase_search_apps(m, nu / rounds)


def cost_trace_mean_k(gamma: float, sigma: float = 6.0) -> int:
    """Sample count k = 6 * (4 * sigma * gamma)^2 for the averaged estimator."""
    return _ceil(6.0 * (4.0 * sigma * gamma) ** 2)


def cost_solver_iterations(n: int, theta: float) -> int:
    """Multiplicative-weights iteration count ln(n)/theta^2 (natural log here)."""
    return max(1, _ceil(math.log(max(n, 2)) / theta**2))


def cost_solve_total(
    m: int,
    iterations: int,
    k: int,
    t_tr: int,
    t_gibbs: int,
    nu: float,
    minfind_M: float = math.pi,
    minfind_delta: float = 1e-2,
    use_minfind: bool = True,
) -> dict:
    """Composite per-solve charge: iterations x (search samples * k * T_gibbs
    + search applications * k * T_tr).

    This is the audited total: the solver charges exactly this, and the
    acceptance check re-evaluates it from the recorded call parameters.
    """
    if use_minfind:
        samples = cost_two_phase_minfind_samples(m, minfind_M, minfind_delta, nu)
        apps = cost_two_phase_minfind_apps(m, minfind_M, minfind_delta, nu)
    else:
        samples = cost_two_phase_search_samples(m, nu)
        apps = cost_two_phase_search_apps(m, nu)
    gibbs_preps = iterations * samples * k
    estimator_calls = iterations * apps * k
    return {
        "gibbs_preps": gibbs_preps,
        "estimator_calls": estimator_calls,
        "queries": gibbs_preps * t_gibbs + estimator_calls * t_tr,
    }


def cost_shadow_samples(m: int, n: int, eps: float) -> dict:
    """Per-run unknown-state sample budget: iterations x log^4(m)/eps^2.

    iterations = ceil(ln(n) * 16 / eps^2) from the membership loop step
    theta = eps/4, and each iteration consumes ceil(log^4(m) * 6/eps^2)
    samples alongside its Gibbs states.  Overall shape:
    log^4(m) * log(n) / eps^4 with the constants above.
    """
    iterations = cost_solver_iterations(n, eps / 4.0)
    per_iter = _ceil(_log2(m) ** 4 * 6.0 / eps**2)
    return {"iterations": iterations, "per_iteration": per_iter, "total": iterations * per_iter}


FORMULAS = {
    "sparse_to_block": cost_sparse_to_block,
    "state_to_block": cost_state_to_block,
    "hamiltonian_to_block": cost_hamiltonian_to_block,
    "hamiltonian_simulation": cost_hamiltonian_simulation,
    "controlled_simulation": cost_controlled_simulation,
    "smooth_function": cost_smooth_function,
    "negative_power": cost_negative_power,
    "positive_power": cost_positive_power,
    "trace_estimator": cost_trace_estimator,
    "gibbs_operator": cost_gibbs_operator,
    "project_uniform": cost_project_uniform,
    "gibbs_state_model": cost_gibbs_state_model,
    "gibbs_seeded": cost_gibbs_seeded,
    "gibbs_decomposition": cost_gibbs_decomposition,
    "two_phase_search_samples": cost_two_phase_search_samples,
    "two_phase_search_apps": cost_two_phase_search_apps,
    "two_phase_minfind_samples": cost_two_phase_minfind_samples,
    "two_phase_minfind_apps": cost_two_phase_minfind_apps,
    "trace_mean_k": cost_trace_mean_k,
    "solver_iterations": cost_solver_iterations,
    "solve_total": cost_solve_total,
    "shadow_samples": cost_shadow_samples,
}


@dataclass
class ChargeEvent:
    """One audited composite charge: formula name, call parameters, value."""

    op: str
    counter: str
    params: dict
    amount: int

    def recompute(self) -> int:
        value = FORMULAS[self.op](**self.params)
        if isinstance(value, dict):
            return int(value["queries"] if "queries" in value else value["total"])
        return int(value)


class QueryLedger:
    """Monotone named counters plus an audit trail of formula-based charges.

    Increments are guarded by a lock so concurrent readers/writers are safe.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.counts: dict[str, int] = {name: 0 for name in COUNTERS}
        self.events: list[ChargeEvent] = []

    def charge(self, counter: str, amount: int = 1) -> None:
        if counter not in self.counts:
            raise KeyError(f"unknown counter {counter!r}")
        if amount < 0:
            raise ValueError("counters are monotone; negative charge refused")
        with self._lock:
            self.counts[counter] += int(amount)

    def charge_formula(self, op: str, counter: str, **params) -> int:
        """Charge the registered formula for ``op`` and record the event."""
        value = FORMULAS[op](**params)
        if isinstance(value, dict):
            amount = int(value["queries"] if "queries" in value else value["total"])
        else:
            amount = int(value)
        self.charge(counter, amount)
        with self._lock:
            self.events.append(ChargeEvent(op=op, counter=counter, params=params, amount=amount))
        return amount

    def record_event(self, op: str, counter: str, params: dict, amount: int) -> None:
        """Append an audited event whose counters were charged separately."""
        with self._lock:
            self.events.append(
                ChargeEvent(op=op, counter=counter, params=dict(params), amount=int(amount))
            )

    def total(self) -> int:
        return sum(self.counts.values())

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "counts": dict(self.counts),
                "total": self.total(),
                "events": [
                    {"op": e.op, "counter": e.counter, "params": e.params, "amount": e.amount}
                    for e in self.events
                ],
            }

    def audit(self) -> bool:
        """Re-evaluate every recorded formula; True iff all amounts match exactly."""
        return all(e.recompute() == e.amount for e in self.events)

    def report(self) -> str:
        return json.dumps(self.snapshot(), indent=2, default=float)
