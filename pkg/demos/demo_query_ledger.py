"""Query-cost accounting from oracle calls up to a full solve.

Raw oracle queries land on named counters one at a time; composite routines
charge registered closed-form formulas whose parameters are recorded, so
every total can be re-derived after the fact.  The conventions (log base 2,
polylog factors 1, explicit constants) live in the registry docstrings.
"""

import numpy as np

import qsdplab as q
from qsdplab.ledger import FORMULAS, cost_trace_mean_k

rng = np.random.default_rng(5)

print("=== raw oracle counting ===")
inst = q.random_instance(rng, n=4, m=3)
oracle = q.SparseOracle(inst)
oracle.index(1, 0, 1)
oracle.entry(2, 1, 1)
oracle.bound(1)
print("counters:", {k: v for k, v in oracle.ledger.counts.items() if v})

print("\n=== composite charges record their formula parameters ===")
ledger = q.QueryLedger()
amount = ledger.charge_formula("gibbs_operator", "gibbs-prep",
                               alpha=2.0, K=4.0, n=16)
event = ledger.events[-1]
print("charged", amount, "for", event.op, "at", event.params,
      "; re-evaluates to", event.recompute())

print("\n=== the averaged-estimator sample count ===")
print("k at gamma = sigma = 6:", cost_trace_mean_k(6.0, 6.0))

print("\n=== a full solve is one audited composite ===")
ledger = q.QueryLedger()
out = q.sdp_solve(inst, epsilon=0.2, seed=9, ledger=ledger)
totals = [e for e in ledger.events if e.op == "solve_total"]
print("composite solve charges:", len(totals))
for e in totals[:2]:
    print("  params:", e.params)
    print("  amount:", e.amount, " recomputed:", e.recompute())
print("audit over all", len(ledger.events), "events:", ledger.audit())
print("counter totals:", {k: v for k, v in ledger.counts.items() if v})

print("\n=== registry ===")
for name in sorted(FORMULAS):
    lines = (FORMULAS[name].__doc__ or "").strip().splitlines()
    doc = lines[0] if lines else ""
    print(f"  {name:28s} {doc}")
