"""Grid-precision sparse vector store with partial-sum tree.

Weights are kept as int64 multiples of a precision grid, so internal nodes
are exactly the sums of their children and adds are order-independent.  The
store produces symmetric state-preparation pairs whose amplitudes are square
roots of the stored weights over a normalization beta, with one designated
padding slot at the first unused index.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .blockenc import StatePrepPair
from .errors import ContractViolation


class SparseVectorTree:
    """m+1 nonnegative weights on a rounding grid, with log-depth updates."""

    def __init__(self, capacity: int, grid: float):
        if capacity < 1:
            raise ContractViolation("capacity must be positive")
        if grid <= 0:
            raise ContractViolation("precision grid must be positive")
        self.capacity = int(capacity)
        self.grid = float(grid)
        size = 1
        while size < capacity:
            size *= 2
        self._size = size
        self.heap = np.zeros(2 * size, dtype=np.int64)
        self.updates = 0

    # -- updates ------------------------------------------------------------

    def add(self, updates) -> None:
        """Add a small batch of (index, weight >= 0) pairs."""
        for idx, weight in updates:
            if not 0 <= idx < self.capacity:
                raise ContractViolation(f"index {idx} out of range")
            if weight < 0:
                raise ContractViolation("weights are nonnegative; no deletion")
            units = int(round(weight / self.grid))
            k = self._size + idx
            while k >= 1:
                self.heap[k] += units
                k //= 2
            self.updates += 1

    # -- reads --------------------------------------------------------------

    def value(self, idx: int) -> float:
        if not 0 <= idx < self.capacity:
            raise ContractViolation(f"index {idx} out of range")
        return float(self.heap[self._size + idx]) * self.grid

    @property
    def root(self) -> float:
        return float(self.heap[1]) * self.grid

    @property
    def nnz(self) -> int:
        return int((self.heap[self._size : self._size + self.capacity] > 0).sum())

    def to_array(self) -> np.ndarray:
        return self.heap[self._size : self._size + self.capacity].astype(np.float64) * self.grid

    def check_sums(self) -> bool:
        """Every internal node equals the exact sum of its children."""
        h = self.heap
        return all(h[k] == h[2 * k] + h[2 * k + 1] for k in range(1, self._size))

    # -- state preparation ---------------------------------------------------

    def prep_pair(self, beta: float) -> StatePrepPair:
        """Symmetric preparation pair; padding slot at index ``capacity``.

        Requires beta >= the stored l1-norm; the declared precision is
        nnz * grid, the worst-case accumulated rounding of the support.
        """
        root = self.root
        if beta <= 0:
            raise ContractViolation("beta must be positive")
        if beta < root - 1e-12:
            raise ContractViolation(f"beta {beta} below stored l1-norm {root}")
        y = self.to_array()
        pad_idx = self.capacity
        size = 1
        while size < self.capacity + 1:
            size *= 2
        amps = np.zeros(size, dtype=np.complex128)
        amps[: self.capacity] = np.sqrt(y / beta)
        amps[pad_idx] = math.sqrt(max(0.0, 1.0 - root / beta))
        nrm = np.linalg.norm(amps)
        amps = amps / nrm
        weights = np.concatenate([y, [beta - root]])
        return StatePrepPair(
            left=amps, right=amps.copy(), beta=float(beta),
            precision=max(self.nnz, 1) * self.grid, active_len=self.capacity + 1,
            weights=weights, symmetric=True,
        )

    # -- checkpointing -------------------------------------------------------

    def snapshot(self) -> str:
        return json.dumps(
            {
                "capacity": self.capacity,
                "grid": self.grid,
                "updates": self.updates,
                "leaves": self.heap[self._size : self._size + self.capacity].tolist(),
            }
        )

    @classmethod
    def restore(cls, text: str) -> "SparseVectorTree":
        data = json.loads(text)
        tree = cls(capacity=int(data["capacity"]), grid=float(data["grid"]))
        for idx, units in enumerate(data["leaves"]):
            units = int(units)
            if units:
                k = tree._size + idx
                while k >= 1:
                    tree.heap[k] += units
                    k //= 2
        tree.updates = int(data["updates"])
        return tree


def solver_grid(gamma: float, iterations: int) -> float:
    """Grid used by the solvers: gamma^-1 / (16 * iterations).

    Keeps the accumulated rounding over a full run below gamma^-1 / 4.
    """
    return 1.0 / (gamma * 16.0 * max(iterations, 1))
