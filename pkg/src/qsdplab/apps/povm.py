"""Turning an implementable measurement into a block-encoding.

A two-outcome measurement run on a quantum computer attaches ancillas,
applies a unitary and accepts when a designated qubit reads zero.  Doubling
the circuit around a controlled-NOT onto one fresh ancilla exposes the
measurement operator itself as the encoded block.
"""

from __future__ import annotations

import numpy as np

from ..blockenc import BlockEncoding, swap_tensor_factors, unitarity_residual
from ..errors import ContractViolation
from ..linalg import hermitian_part


def measurement_unitary(M) -> tuple[np.ndarray, int]:
    """Reference implementation of a measurement circuit for 0 <= M <= I.

    Returns (U, a) with a = 1 ancilla qubit appended after the system;
    accepting on the ancilla reading |0> happens with probability Tr(M rho).
    """
    M = hermitian_part(np.asarray(M, dtype=np.complex128))
    w = np.linalg.eigvalsh(M)
    if w.min() < -1e-10 or w.max() > 1 + 1e-10:
        raise ContractViolation("measurement operator must satisfy 0 <= M <= I")
    wM, V = np.linalg.eigh(M)
    root = (V * np.sqrt(np.clip(wM, 0, None))) @ V.conj().T
    coroot = (V * np.sqrt(np.clip(1 - wM, 0, None))) @ V.conj().T
    # qubit-first blocks, then reindex to system-first (ancilla last)
    U = np.block([[root, -coroot], [coroot, root]])
    n = M.shape[0]
    return swap_tensor_factors(U, 2, n), 1


def povm_to_block_encoding(
    U: np.ndarray,
    ancillas: int,
    eps: float,
    target=None,
) -> BlockEncoding:
    """(1, a+1, eps)-encoding of the operator measured by the given circuit.

    ``U`` acts on system-then-ancillas with acceptance defined by the last
    qubit reading |0>.  The construction appends one fresh qubit, conjugates
    a controlled-NOT from the accept qubit onto it, and the resulting block
    (with every ancilla projected back to zero) is the measurement operator
    up to the circuit's bias eps.
    """
    U = np.asarray(U, dtype=np.complex128)
    if unitarity_residual(U) > 1e-10:
        raise ContractViolation("measurement circuit is not unitary")
    dim_total = U.shape[0]
    n = dim_total >> ancillas
    if n << ancillas != dim_total:
        raise ContractViolation("circuit dimension inconsistent with the ancilla count")
    Uprime = np.kron(U, np.eye(2))
    # controlled-NOT: control = old last qubit (accept flag), target = new qubit
    cnot = np.eye(4)
    cnot[[2, 3]] = cnot[[3, 2]]
    gate = np.kron(np.eye(dim_total // 2), cnot)
    V = Uprime.conj().T @ gate @ Uprime
    # layout is system-first with a+1 trailing ancillas; flip for the block
    flipped = swap_tensor_factors(V, n, 1 << (ancillas + 1))
    return BlockEncoding(
        unitary=flipped, alpha=1.0, ancillas=ancillas + 1, epsilon=eps, dim=n,
        target=target, note="measurement->encoding",
    )
