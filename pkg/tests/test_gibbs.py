import math

import numpy as np
import pytest

from qsdplab.errors import ContractViolation
from qsdplab.gibbs import (
    GibbsRequest,
    gibbs_exact,
    gibbs_operator_model,
    gibbs_state_decomposition,
    gibbs_state_model,
    gibbs_state_model_seeded,
    project_uniform,
    seed_width_bits,
)
from qsdplab.instance import random_instance
from qsdplab.ledger import QueryLedger, cost_gibbs_operator
from qsdplab.linalg import Projector, gibbs_state, hermitian_part, trace_distance
from qsdplab.oracles import OperatorOracle, state_decomposition_for_instance
from qsdplab.vecstore import SparseVectorTree


def split_states(H):
    """(plus, minus) with (plus - minus)/2 = H, built from the spectral parts."""
    w, V = np.linalg.eigh(H)
    plus = (V * (2.0 * np.clip(w, 0, None))) @ V.conj().T
    minus = (V * (2.0 * np.clip(-w, 0, None))) @ V.conj().T
    return plus, minus


def test_gibbs_exact_examples(rng, herm):
    mats = [np.diag([1.0, 0.0]).astype(complex)]
    y = np.array([np.log(3.0)])
    rho = gibbs_exact(y, mats)
    assert np.allclose(np.diag(rho.mat).real, [0.25, 0.75])
    rho0 = gibbs_exact(np.zeros(1), mats)
    assert np.allclose(rho0.mat, np.eye(2) / 2)
    shifted = gibbs_exact(y, [mats[0] + np.eye(2)])
    assert trace_distance(rho, shifted) <= 1e-12


def test_operator_model_zero_weights(rng):
    inst = random_instance(rng, n=4, m=3)
    oracle = OperatorOracle.from_instance(inst)
    out, charge = gibbs_operator_model(oracle, np.zeros(inst.m + 1), theta=1e-3)
    assert np.allclose(out.mat, np.eye(4) / 4)
    assert charge == cost_gibbs_operator(1.0, 1.0, 4)


def test_operator_model_sparse_weights(rng):
    inst = random_instance(rng, n=8, m=4)
    oracle = OperatorOracle.from_instance(inst)
    mats = [inst.constraint(j) for j in range(inst.m + 1)]
    y = np.zeros(inst.m + 1)
    y[1], y[3] = 1.1, 0.6
    out, _ = gibbs_operator_model(oracle, y, theta=1e-3)
    assert trace_distance(out, gibbs_exact(y, mats)) <= 1e-3


def test_operator_model_from_tree(rng):
    inst = random_instance(rng, n=4, m=3)
    oracle = OperatorOracle.from_instance(inst)
    tree = SparseVectorTree(inst.m + 1, grid=1e-12)
    tree.add([(0, 0.4), (2, 0.9)])
    out, _ = gibbs_operator_model(oracle, tree, theta=1e-3)
    mats = [inst.constraint(j) for j in range(inst.m + 1)]
    assert trace_distance(out, gibbs_exact(tree.to_array(), mats)) <= 1e-3


def test_operator_model_charge_doubles_with_K(rng):
    inst = random_instance(rng, n=4, m=3)
    oracle = OperatorOracle.from_instance(inst)
    y = np.zeros(inst.m + 1)
    y[1] = 0.5
    _, c1 = gibbs_operator_model(oracle, y, theta=1e-3, K=2.0)
    _, c2 = gibbs_operator_model(oracle, y, theta=1e-3, K=4.0)
    assert c2 == 2 * c1


def test_project_uniform_exact_input():
    P = Projector(np.diag([1.0, 1.0, 0.0]))
    q = 0.2
    rho = q * P.mat
    out = project_uniform(rho, P, q, nu=0.0)
    assert np.linalg.norm(out.part - (q / 4.0) * P.mat, 2) <= 1e-9
    assert out.scale == pytest.approx(q / 4.0)


def test_project_uniform_rank_one_trace():
    P = Projector(np.diag([1.0, 0.0]))
    q = 0.3
    out = project_uniform(q * P.mat, P, q, nu=0.0)
    assert out.trace == pytest.approx(q / 4.0, abs=1e-9)


def test_project_uniform_perturbed_error_bound(rng):
    n = 6
    P = Projector(np.diag([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]))
    q = 0.15
    base = np.diag([q * 1.5, q * 1.2, q * 1.1, 0, 0, 0]).astype(complex)
    nu = 1e-4
    pert = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    pert = hermitian_part(pert)
    pert *= (2 * nu) / np.abs(np.linalg.eigvalsh(pert)).sum()
    tilde = base.copy()
    tilde[:3, :3] += pert
    out = project_uniform(tilde, P, q, nu=nu, exact_reference=base)
    dev = 0.5 * np.abs(np.linalg.eigvalsh(out.part - (q / 4) * P.mat)).sum()
    assert dev <= 8.0 * nu / q + 1e-8


def test_project_uniform_charges(rng):
    ledger = QueryLedger()
    P = Projector(np.diag([1.0, 0.0]))
    project_uniform(0.25 * P.mat, P, 0.25, nu=0.0, ledger=ledger)
    assert ledger.counts["state-prep"] == 4  # ceil(1/q)


def test_project_uniform_rejects_undominated():
    P = Projector(np.diag([1.0, 0.0]))
    with pytest.raises(ContractViolation, match="dominated"):
        project_uniform(0.1 * P.mat, P, 0.5, nu=0.0)


def test_state_model_zero_hamiltonian():
    n = 4
    rho = np.eye(n, dtype=complex) / n
    out, info = gibbs_state_model(rho, rho, beta=1.0, q=1.0 / 1.0, eta=0.05,
                                  delta=0.1)
    assert trace_distance(out, np.eye(n) / n) <= 1e-9
    assert info["high_empty"]


def test_state_model_spec_example():
    H = np.diag([0.3, 0.1, -0.1, -0.3]).astype(complex)
    plus, minus = split_states(H)
    out, info = gibbs_state_model(plus, minus, beta=2.0, q=0.2, eta=0.05,
                                  delta=0.05)
    ref = gibbs_state(-2.0 * H)  # exp(+2H)/Tr
    assert trace_distance(out, ref) <= 0.05
    assert info["high_trace"] >= 0.2 / (16.0 * math.e) - 1e-9


def test_state_model_high_part_floor(rng, herm):
    for trial in range(5):
        n = 8
        H = herm(rng, n, norm=0.35)
        H /= max(1.0, np.abs(np.linalg.eigvalsh(H)).sum())
        plus, minus = split_states(H)
        beta = 2.0
        q = 0.4 / beta
        gap = np.abs(np.abs(np.linalg.eigvalsh(H)) - q).min()
        if gap < 1e-3:
            continue
        out, info = gibbs_state_model(plus, minus, beta=beta, q=q, eta=gap / 2,
                                      delta=0.05)
        if not info["high_empty"]:
            assert info["high_trace"] >= q / (16.0 * math.e) - 1e-9
        assert info["low_trace"] >= 1.0 / (8.0 * math.e**2) - 1e-9
        assert trace_distance(out, gibbs_state(-beta * H)) <= 0.05


def test_state_model_rejects_near_spectrum_cut():
    H = np.diag([0.25, -0.25]).astype(complex)
    plus, minus = split_states(H)
    with pytest.raises(ContractViolation, match="close to the spectrum"):
        gibbs_state_model(plus, minus, beta=1.0, q=0.2501, eta=0.01, delta=0.1)


def test_state_model_mislabeling_only_fires_near_cut(rng):
    # under the separation precondition injected errors never fire
    H = np.diag([0.3, -0.3]).astype(complex)
    plus, minus = split_states(H)
    out, _ = gibbs_state_model(plus, minus, beta=1.0, q=0.6, eta=0.05,
                               delta=0.05, mislabel_rng=rng)
    assert trace_distance(out, gibbs_state(-H)) <= 0.05


def test_seeded_zero_hamiltonian_every_seed():
    n = 4
    rho = np.eye(n, dtype=complex) / n
    bits = seed_width_bits(1.0, 0.2)
    for seed in range(1 << bits):
        out, info = gibbs_state_model_seeded(rho, rho, beta=1.0, theta=0.05,
                                             delta=0.2, seed=seed)
        assert out is not None
        assert trace_distance(out, np.eye(n) / n) <= 1e-9


def test_seeded_sweep_success_fraction(rng, herm):
    n = 8
    H = herm(rng, n)
    H /= 2.2 * np.abs(np.linalg.eigvalsh(H)).sum()
    plus, minus = split_states(H)
    beta, delta, theta = 2.0, 0.2, 0.05
    bits = seed_width_bits(beta, delta)
    ok = failed = 0
    for seed in range(1 << bits):
        out, info = gibbs_state_model_seeded(plus, minus, beta=beta,
                                             theta=theta, delta=delta, seed=seed)
        if out is None:
            assert info["seed_failed"]
            failed += 1
            continue
        ok += 1
        assert trace_distance(out, gibbs_state(beta * H)) <= theta
    assert ok >= (1 - delta) * (ok + failed)


def test_seeded_delegates_for_large_beta(rng, herm):
    n = 4
    H = herm(rng, n, norm=0.2)
    plus, minus = split_states(H)
    out, info = gibbs_state_model_seeded(plus, minus, beta=4.0, theta=0.05,
                                         delta=0.2, seed=0)
    assert info["path"] == "operator-fallback"
    assert trace_distance(out, gibbs_state(4.0 * H)) <= 1e-9


def test_seeded_charge_scales(rng):
    ledger = QueryLedger()
    n = 4
    rho = np.eye(n, dtype=complex) / n
    gibbs_state_model_seeded(rho, rho, beta=2.0, theta=0.05, delta=0.2,
                             seed=0, ledger=ledger)
    first = ledger.counts["state-prep"]
    gibbs_state_model_seeded(rho, rho, beta=4.0, theta=0.05, delta=0.2,
                             seed=0, ledger=ledger)
    second = ledger.counts["state-prep"] - first
    assert second / first == pytest.approx(2.0**3.5, rel=0.05)


def test_decomposition_identity_terms_only():
    n = 4
    decomp_states = [np.zeros((n, n), dtype=complex)]
    from qsdplab.oracles import StateDecomposition

    decomp = StateDecomposition(
        plus_weight=np.array([0.0]), minus_weight=np.array([0.0]),
        id_weight=np.array([1.0]), plus_state=decomp_states,
        minus_state=decomp_states, norm_bound=1.0,
    )
    tp = SparseVectorTree(1, 1e-12)
    tm = SparseVectorTree(1, 1e-12)
    out, _ = gibbs_state_decomposition(decomp, tp, tm, K=1.0, theta=0.05)
    assert trace_distance(out, np.eye(n) / n) <= 1e-9


def test_decomposition_single_pure_state():
    n = 4
    pure = np.zeros((n, n), dtype=complex)
    pure[0, 0] = 1.0
    from qsdplab.oracles import StateDecomposition

    decomp = StateDecomposition(
        plus_weight=np.array([1.0]), minus_weight=np.array([0.0]),
        id_weight=np.array([0.0]), plus_state=[pure],
        minus_state=[np.zeros((n, n), dtype=complex)], norm_bound=1.0,
    )
    tp = SparseVectorTree(1, 1e-12)
    tm = SparseVectorTree(1, 1e-12)
    tp.add([(0, 1.0)])
    out, _ = gibbs_state_decomposition(decomp, tp, tm, K=1.0, theta=0.05)
    ref = gibbs_state(pure)   # exp(-rho_pure)/Tr
    assert trace_distance(out, ref) <= 0.05


def test_decomposition_random_instance(rng):
    inst = random_instance(rng, n=4, m=3)
    decomp = state_decomposition_for_instance(inst)
    y = np.zeros(inst.m + 1)
    y[2] = 0.7
    tp = SparseVectorTree(inst.m + 1, 1e-12)
    tm = SparseVectorTree(inst.m + 1, 1e-12)
    for j in range(inst.m + 1):
        if y[j]:
            tp.add([(j, y[j] * decomp.plus_weight[j])])
            tm.add([(j, y[j] * decomp.minus_weight[j])])
    out, _ = gibbs_state_decomposition(decomp, tp, tm, K=max(y.sum(), 1.0),
                                       theta=0.05, seed=3)
    mats = [inst.constraint(j) for j in range(inst.m + 1)]
    assert trace_distance(out, gibbs_exact(y, mats)) <= 0.05


def test_decomposition_charge_formula(rng):
    ledger = QueryLedger()
    n = 4
    from qsdplab.oracles import StateDecomposition

    decomp = StateDecomposition(
        plus_weight=np.array([1.0]), minus_weight=np.array([0.0]),
        id_weight=np.array([0.0]), plus_state=[np.eye(n, dtype=complex) / n],
        minus_state=[np.zeros((n, n), dtype=complex)], norm_bound=2.0,
    )
    tp = SparseVectorTree(1, 1e-12)
    tm = SparseVectorTree(1, 1e-12)
    tp.add([(0, 1.0)])
    gibbs_state_decomposition(decomp, tp, tm, K=3.0, theta=0.05, ledger=ledger)
    assert ledger.counts["state-prep"] == math.ceil(5.0 * 6.0**3.5)
    assert ledger.audit()


def test_gibbs_request_validation():
    tree = SparseVectorTree(4, 1e-9)
    tree.add([(0, 2.0)])
    with pytest.raises(ContractViolation):
        GibbsRequest(store=tree, K=1.0, d=1, theta=0.5)
    with pytest.raises(ContractViolation):
        GibbsRequest(store=tree, K=3.0, d=1, theta=1.5)
    GibbsRequest(store=tree, K=3.0, d=1, theta=0.5)


def test_state_model_randomized_suite(rng, herm):
    # difference-sampler outputs stay within the advertised distance on a
    # randomized suite up to dimension 16
    done = 0
    attempts = 0
    while done < 30 and attempts < 120:
        attempts += 1
        n = int(rng.choice([4, 8, 16]))
        H = herm(rng, n)
        H /= (2.0 + rng.uniform(0, 2)) * np.abs(np.linalg.eigvalsh(H)).sum()
        plus, minus = split_states(H)
        beta = float(rng.uniform(1.0, min(8.0, n / 2.0)))
        q = rng.uniform(max(2.0 / n, 1.0 / (2 * beta)), 1.0 / beta)
        gap = float(np.abs(np.linalg.eigvalsh(H) - q).min())
        if gap < 1e-4:
            continue
        out, _ = gibbs_state_model(plus, minus, beta=beta, q=q, eta=gap / 2,
                                   delta=0.05)
        assert trace_distance(out, gibbs_state(-beta * H)) <= 0.05
        done += 1
    assert done == 30


def test_operator_model_accepts_request(rng):
    inst = random_instance(rng, n=4, m=3)
    oracle = OperatorOracle.from_instance(inst)
    tree = SparseVectorTree(inst.m + 1, grid=1e-12)
    tree.add([(1, 0.8)])
    req = GibbsRequest(store=tree, K=2.0, d=1, theta=1e-3)
    out, charge = gibbs_operator_model(oracle, req)
    mats = [inst.constraint(j) for j in range(inst.m + 1)]
    assert trace_distance(out, gibbs_exact(tree.to_array(), mats)) <= 1e-3
    assert charge == cost_gibbs_operator(1.0, 2.0, 4)
