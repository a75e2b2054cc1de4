"""The two-outcome trace estimator and its averaged form.

A single sample accepts with probability 1/8 + Tr(A rho)/16 through the
square-root landing of I/2 + A/4, reporting 14 on success and -2 otherwise.
The mean is the trace, the variance is 256 p (1-p), and averaging
k = 6 (4 sigma gamma)^2 draws gives resolution 1/(4 gamma) by Chebyshev.
"""

import numpy as np

import qsdplab as q
from qsdplab.traceest import estimator_mean, estimator_variance, required_sample_count

rng = np.random.default_rng(3)

A = np.diag([1.0, -1.0]).astype(complex)
rho = np.diag([0.8, 0.2]).astype(complex)
est = q.build_trace_estimator(A)
p = est.probability(rho)
print("acceptance probability p =", p)
print("single-draw mean 16p-2 =", estimator_mean(p),
      " (exact trace =", float(np.trace(A @ rho).real), ")")
print("single-draw variance 256p(1-p) =", estimator_variance(p))

print("\n=== empirical check over 100000 draws ===")
draws = np.where(rng.random(100_000) < p, 14.0, -2.0)
print("empirical mean:", draws.mean(), " empirical std:", draws.std())

print("\n=== averaged estimate at solver resolution ===")
gamma = 6.0
k = required_sample_count(gamma)
print("sample count k = 6*(4*sigma*gamma)^2 =", k)
ledger = q.QueryLedger()
vals = [q.trace_mean_estimate(est, rho, k, rng, ledger=ledger) for _ in range(10)]
print("ten averaged estimates:", np.round(vals, 4))
print("all within 1/(2 gamma) of the trace:",
      bool(np.max(np.abs(np.array(vals) - 0.6)) <= 0.5 / gamma))
print("ledger counters:", {k_: v for k_, v in ledger.counts.items() if v})
