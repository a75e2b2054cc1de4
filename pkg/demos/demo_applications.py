"""The four application drivers.

Expectation-value estimation from few unknown-state samples, total-success
state discrimination with a compressed POVM, experiment-distribution design
maximizing the information floor, and the measurement-to-encoding reduction.
"""

import numpy as np

import qsdplab as q
from qsdplab.apps import (
    DesignTask,
    DiscriminationTask,
    ShadowTask,
    measurement_unitary,
    povm_to_block_encoding,
    shadow_tomography,
    solve_e_optimal,
    solve_state_discrimination,
)

rng = np.random.default_rng(23)

print("=== expectation values from few unknown-state samples ===")
n, m = 4, 8
W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
tau = W @ W.conj().T
tau /= np.trace(tau).real
meas = []
for _ in range(m):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    meas.append(np.outer(v, v.conj()))
res = shadow_tomography(ShadowTask(tau, meas, eps=0.1), seed=1)
print("worst estimate error:",
      float(np.abs(res["estimates"] - res["targets"]).max()), "<= 0.1")
print("unknown-state samples charged:", res["sample_charge"],
      "(equals the registered log^4(m) log(n)/eps^4 formula)")
print("iterations used:", res["iterations"])

print("\n=== total-success state discrimination ===")
states = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
res = solve_state_discrimination(DiscriminationTask(states), eps=0.2, seed=2)
print("orthogonal pair: optimum estimate", round(res["opt_estimate"], 3), "~ 2")
print("POVM blocks (diagonals):",
      [np.round(np.diag(M).real, 3).tolist() for M in res["povm"]])
print("dominating dual matrix:\n", np.round(res["dual_matrix"].real, 3))

print("\n=== experiment-distribution design ===")
d = 3
res = solve_e_optimal(DesignTask(np.eye(d), np.ones(d)), eps=0.04, seed=3)
print("standard basis: information floor", round(res["t"], 4), "~", round(1 / d, 4))
print("distribution:", np.round(res["p"], 3))
single = solve_e_optimal(DesignTask(np.array([[1.0, 0.0]]), np.array([1.0])),
                         eps=0.04, seed=4)
print("single experiment: floor", round(single["t"], 6), "(rank-deficient)")

print("\n=== measurement circuit to encoding ===")
M = np.diag([1.0, 0.0]).astype(complex)
U, a = measurement_unitary(M)
enc = povm_to_block_encoding(U, a, eps=1e-9, target=M)
print("encoded measurement operator:\n", np.round(q.extract_block(enc).real, 8))
rho = np.array([[0.7, 0.1], [0.1, 0.3]], dtype=complex)
print("accept probability equals Tr(M rho):",
      float(np.trace(q.extract_block(enc) @ rho).real), "=",
      float(np.trace(M @ rho).real))
