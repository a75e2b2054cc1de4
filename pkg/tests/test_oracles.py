import numpy as np
import pytest

from qsdplab.blockenc import extract_block
from qsdplab.errors import ContractViolation
from qsdplab.instance import SdpInstance, random_instance
from qsdplab.oracles import (
    HamiltonianOracle,
    OperatorOracle,
    SparseOracle,
    StateDecomposition,
    hamiltonian_oracle_for_instance,
    hamiltonian_to_operator,
    hamiltonian_to_state,
    state_decomposition_for_instance,
    to_block_encoding_sparse,
    to_block_encoding_state,
)


def test_sparse_access_identity_rows(rng):
    inst = random_instance(rng, n=4, m=2)
    oracle = SparseOracle(inst)
    for k in range(4):
        col, ok = oracle.index(1, k, 1)   # constraint 1 is the identity
        assert ok and col == k


def test_sparse_entry_zero_and_values(rng):
    inst = random_instance(rng, n=3, m=2, diagonal=True)
    oracle = SparseOracle(inst)
    assert oracle.entry(1, 0, 1) == 0
    assert oracle.entry(1, 2, 2) == pytest.approx(1.0)


def test_sparse_index_matches_brute_scan(rng):
    n = 6
    row = np.zeros((n, n), dtype=complex)
    cols = sorted(rng.choice(n, size=3, replace=False))
    for c in cols:
        row[0, c] = row[c, 0] = 0.3
    np.fill_diagonal(row, 0.1)
    row /= np.linalg.norm(row, 2)
    inst = SdpInstance(
        A=np.stack([np.eye(n, dtype=complex), row]), C=np.eye(n, dtype=complex) / 2,
        b=np.array([1.0, 1.0]), R=1.0, r=1.0,
    )
    oracle = SparseOracle(inst)
    expected = np.flatnonzero(np.abs(row[0]) > 0)
    got = []
    for ell in range(1, len(expected) + 1):
        col, ok = oracle.index(2, 0, ell)
        assert ok
        got.append(col)
    assert got == sorted(got) == expected.tolist()


def test_sparse_degenerate_slot_returns_sentinel(rng):
    inst = random_instance(rng, n=4, m=2, diagonal=True)
    oracle = SparseOracle(inst)
    col, ok = oracle.index(1, 0, min(2, inst.s))
    if inst.s >= 2:
        assert not ok and col == 2


def test_every_query_hits_one_counter(rng):
    inst = random_instance(rng, n=3, m=2)
    oracle = SparseOracle(inst)
    before = dict(oracle.ledger.counts)
    oracle.index(1, 0, 1)
    oracle.entry(0, 1, 1)
    oracle.bound(2)
    after = oracle.ledger.counts
    assert after["sparse-index"] == before["sparse-index"] + 1
    assert after["sparse-entry"] == before["sparse-entry"] + 1
    assert after["b-vector"] == before["b-vector"] + 1


def test_bound_values_bit_exact(rng):
    inst = random_instance(rng, n=3, m=4)
    oracle = SparseOracle(inst)
    for j in range(1, inst.m + 1):
        assert oracle.bound(j) == inst.b[j - 1]


def test_sparse_to_block_encoding(rng):
    inst = random_instance(rng, n=4, m=3)
    oracle = SparseOracle(inst)
    for j in (0, 1, 2):
        enc = to_block_encoding_sparse(oracle, j, eps=1e-6)
        assert enc.alpha == inst.s
        assert np.linalg.norm(extract_block(enc) - inst.constraint(j), 2) <= 1e-6
    with pytest.raises(ContractViolation):
        to_block_encoding_sparse(oracle, 1, eps=0.0)


def test_state_decomposition_invariant(rng):
    inst = random_instance(rng, n=4, m=3)
    decomp = state_decomposition_for_instance(inst)
    for j in range(inst.m + 1):
        rebuilt = decomp.matrix(j)
        assert np.linalg.norm(rebuilt - inst.constraint(j), 2) <= 1e-9
        wp, wm, wi = decomp.weights(j)
        assert wp + wm + abs(wi) <= decomp.norm_bound + 1e-9


def test_state_to_block_encoding_identity_term():
    n = 2
    decomp = StateDecomposition(
        plus_weight=np.array([0.0]), minus_weight=np.array([0.0]),
        id_weight=np.array([1.0]),
        plus_state=[np.zeros((n, n), dtype=complex)],
        minus_state=[np.zeros((n, n), dtype=complex)],
        norm_bound=1.0,
    )
    enc = to_block_encoding_state(decomp, 0)
    assert np.linalg.norm(extract_block(enc) - np.eye(n), 2) <= 1e-10


def test_state_to_block_encoding_pure_state_exact():
    n = 2
    pure = np.diag([1.0, 0.0]).astype(complex)
    decomp = StateDecomposition(
        plus_weight=np.array([1.0]), minus_weight=np.array([0.0]),
        id_weight=np.array([0.0]), plus_state=[pure],
        minus_state=[np.zeros((n, n), dtype=complex)], norm_bound=1.0,
    )
    enc = to_block_encoding_state(decomp, 0, explicit_purification=True)
    assert np.linalg.norm(extract_block(enc) - pure, 2) <= 1e-10


def test_state_to_block_encoding_random(rng):
    inst = random_instance(rng, n=4, m=3)
    decomp = state_decomposition_for_instance(inst)
    for j in range(2):
        enc = to_block_encoding_state(decomp, j)
        assert enc.alpha == decomp.norm_bound
        assert np.linalg.norm(extract_block(enc) - inst.constraint(j), 2) <= 1e-8


def test_reduction_chain_closure(rng):
    # sparse -> operator with alpha = s; state -> operator with alpha = B
    inst = random_instance(rng, n=4, m=3)
    sparse = SparseOracle(inst)
    decomp = state_decomposition_for_instance(inst)
    for j in range(inst.m + 1):
        e1 = to_block_encoding_sparse(sparse, j, 1e-6)
        e2 = to_block_encoding_state(decomp, j)
        assert np.linalg.norm(extract_block(e1) - inst.constraint(j), 2) <= 1e-6
        assert np.linalg.norm(extract_block(e2) - inst.constraint(j), 2) <= 1e-8


def test_operator_oracle_charges(rng):
    inst = random_instance(rng, n=3, m=2)
    oracle = OperatorOracle.from_instance(inst)
    before = oracle.ledger.counts["operator-U"]
    oracle.encoding(1)
    assert oracle.ledger.counts["operator-U"] == before + 1


def test_hamiltonian_oracle_validation(rng):
    inst = random_instance(rng, n=3, m=2)
    mats = [inst.constraint(j) for j in range(inst.m + 1)]
    with pytest.raises(ContractViolation):
        HamiltonianOracle(matrices=mats, t=np.full(len(mats), 1.0), tau=1.0)
    oracle = hamiltonian_oracle_for_instance(inst, tau=2.0)
    step = oracle.evolve(1)
    w, V = np.linalg.eigh(mats[1])
    ref = (V * np.exp(1j * w / 2.0)) @ V.conj().T
    assert np.linalg.norm(step - ref, 2) <= 1e-10


def test_hamiltonian_to_operator_zero_matrix():
    n = 2
    mats = [np.zeros((n, n), dtype=complex), np.eye(n, dtype=complex)]
    oracle = HamiltonianOracle(matrices=mats, t=np.array([2.0, 2.0]), tau=2.0)
    enc = hamiltonian_to_operator(oracle, 0, eps=1e-6)
    assert np.linalg.norm(extract_block(enc), 2) <= 1e-6
    assert enc.alpha == 4.0


def test_hamiltonian_to_operator_perturbed_instance():
    eps_i = 0.05
    A = np.eye(2, dtype=complex) / 2 + eps_i * np.diag([1.0, -1.0])
    oracle = HamiltonianOracle(matrices=[A], t=np.array([2.0]), tau=2.0)
    enc = hamiltonian_to_operator(oracle, 0, eps=1e-6)
    assert np.linalg.norm(extract_block(enc) - A, 2) <= 1e-6


def test_hamiltonian_to_operator_charge_grows_additively():
    A = np.eye(2, dtype=complex) / 2
    oracle = HamiltonianOracle(matrices=[A], t=np.array([2.0]), tau=2.0)
    hamiltonian_to_operator(oracle, 0, eps=1e-4)
    first = oracle.ledger.counts["hamiltonian"]
    hamiltonian_to_operator(oracle, 0, eps=5e-5)
    second = oracle.ledger.counts["hamiltonian"] - first
    assert 0 <= second - first <= 2   # halving eps adds O(1) queries


def test_hamiltonian_to_state_zero_matrix():
    n = 2
    mats = [np.zeros((n, n), dtype=complex)]
    oracle = HamiltonianOracle(matrices=mats, t=np.array([4.0]), tau=4.0)
    out = hamiltonian_to_state(oracle, 0, eps=1e-6)
    assert np.allclose(out["plus"], np.eye(n) / (2 * n), atol=1e-6)
    assert np.allclose(out["minus"], np.eye(n) / (2 * n), atol=1e-6)


def test_hamiltonian_to_state_z_matrix():
    Zm = np.diag([1.0, -1.0]).astype(complex)
    oracle = HamiltonianOracle(matrices=[Zm], t=np.array([4.0]), tau=4.0)
    out = hamiltonian_to_state(oracle, 0, eps=1e-6)
    diff = out["plus"] - out["minus"]
    assert np.linalg.norm(diff - Zm / 8.0, 2) <= 1e-6
    # reconstruction with weights n * t recovers the matrix
    rec = out["weight"] * (out["plus"] - out["minus"])
    assert np.linalg.norm(rec - Zm, 2) <= out["weight"] * 1e-6
    assert out["norm_bound"] == 2 * 4.0


def test_hamiltonian_to_state_requires_diagonal(rng, herm):
    H = herm(rng, 2)
    H[0, 1] += 0.1
    H[1, 0] += 0.1
    oracle = HamiltonianOracle(matrices=[(H + H.conj().T) / 2],
                               t=np.array([4.0]), tau=4.0)
    with pytest.raises(ContractViolation, match="diagonal"):
        hamiltonian_to_state(oracle, 0, eps=1e-6)
