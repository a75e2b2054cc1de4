"""Problem instances in standard primal/dual form and their JSON format.

An instance is max Tr(C X) over psd X subject to Tr(A_j X) <= b_j, with the
first constraint fixed to A_1 = I, b_1 = R so the solution trace is bounded.
All constraint matrices and the objective have operator norm at most one, and
an explicit bound r on the l1-norm of some optimal dual solution is part of
the data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .linalg import hermitian_part, symmetrize

NORM_SLACK = 1e-9


def _row_sparsity(A: np.ndarray) -> int:
    return int(max((np.abs(row) > 0).sum() for row in A))


@dataclass(frozen=True)
class SdpInstance:
    """The tuple (A_1..A_m, C, b, R, r, n, m, s)."""

    A: np.ndarray        # (m, n, n) complex, A[0] is the trace constraint I
    C: np.ndarray        # (n, n) complex
    b: np.ndarray        # (m,) real
    R: float
    r: float
    s: int = field(default=0)

    def __post_init__(self):
        A = np.ascontiguousarray(np.asarray(self.A, dtype=np.complex128))
        C = np.ascontiguousarray(np.asarray(self.C, dtype=np.complex128))
        b = np.ascontiguousarray(np.asarray(self.b, dtype=np.float64))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "b", b)
        if self.s == 0:
            object.__setattr__(self, "s", max(_row_sparsity(Aj) for Aj in A))
        self.validate()
        for arr in (self.A, self.C, self.b):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def constraint(self, j: int) -> np.ndarray:
        """A_j for j in 1..m, with j = 0 giving the objective view -C."""
        if j == 0:
            return -self.C
        return self.A[j - 1]

    def extended(self, g: float) -> tuple[np.ndarray, np.ndarray]:
        """(m+1, n, n) stack with row 0 = -C, and b with b_0 = -g."""
        ext_A = np.concatenate([(-self.C)[None, :, :], self.A], axis=0)
        ext_b = np.concatenate([[-g], self.b])
        return ext_A, ext_b

    @property
    def is_diagonal(self) -> bool:
        off = sum(
            float(np.abs(M - np.diag(np.diag(M))).max()) for M in (self.C, *self.A)
        )
        return off == 0.0

    def validate(self) -> None:
        n, m = self.n, self.m
        if self.A.shape != (m, n, n):
            raise ContractViolation(f"constraint stack shape {self.A.shape} != ({m},{n},{n})")
        if self.b.shape != (m,):
            raise ContractViolation("b length does not match the constraint count")
        if not np.allclose(self.A[0], np.eye(n), atol=1e-12):
            raise ContractViolation("first constraint matrix must be the identity")
        if abs(self.b[0] - self.R) > 1e-12:
            raise ContractViolation("first bound must equal the trace bound R")
        if self.R < 1 or self.r < 1:
            raise ContractViolation("trace bound R and dual bound r must be >= 1")
        if np.linalg.norm(self.C, 2) > 1 + NORM_SLACK:
            raise ContractViolation("objective norm exceeds 1")
        for j, Aj in enumerate(self.A, start=1):
            if np.linalg.norm(Aj - Aj.conj().T, 2) > 1e-10:
                raise ContractViolation(f"constraint {j} is not Hermitian")
            if np.linalg.norm(Aj, 2) > 1 + NORM_SLACK:
                raise ContractViolation(f"constraint {j} norm exceeds 1")
            if _row_sparsity(Aj) > self.s:
                raise ContractViolation(f"constraint {j} has more than s={self.s} nonzeros per row")

    # -- JSON wire format ---------------------------------------------------

    def to_json(self) -> str:
        def cplx(M):
            M = np.asarray(M, dtype=np.complex128)
            return [[[float(v.real), float(v.imag)] for v in row] for row in M]

        return json.dumps(
            {
                "n": self.n,
                "m": self.m,
                "s": self.s,
                "R": float(self.R),
                "r": float(self.r),
                "C": cplx(self.C),
                "A": [cplx(Aj) for Aj in self.A],
                "b": [float(v) for v in self.b],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SdpInstance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ContractViolation(f"invalid JSON: {exc}") from exc
        for key in ("n", "m", "s", "R", "r", "C", "A", "b"):
            if key not in data:
                raise ContractViolation(f"missing field {key!r}")

        def decode(M, what):
            arr = np.asarray(M, dtype=np.float64)
            if arr.ndim != 3 or arr.shape[-1] != 2:
                raise ContractViolation(f"{what} must be a matrix of [re, im] pairs")
            return arr[..., 0] + 1j * arr[..., 1]

        C = decode(data["C"], "C")
        A = np.stack([decode(Aj, f"A[{i}]") for i, Aj in enumerate(data["A"])])
        inst = cls(A=A, C=C, b=np.asarray(data["b"], dtype=np.float64),
                   R=float(data["R"]), r=float(data["r"]), s=int(data["s"]))
        if inst.n != int(data["n"]) or inst.m != int(data["m"]):
            raise ContractViolation("declared n/m do not match the matrix shapes")
        return inst


def load_instance(path: str) -> SdpInstance:
    with open(path) as fh:
        return SdpInstance.from_json(fh.read())


def save_instance(instance: SdpInstance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(instance.to_json())


# -- generators used by the demos and test suites --------------------------

def random_hermitian(rng: np.random.Generator, n: int, diagonal: bool = False) -> np.ndarray:
    if diagonal:
        M = np.diag(rng.normal(size=n)).astype(np.complex128)
    else:
        M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        M = hermitian_part(M)
    nrm = np.linalg.norm(M, 2)
    return M / nrm if nrm > 0 else M


def random_instance(
    rng: np.random.Generator,
    n: int,
    m: int,
    R: float = 1.0,
    b_low: float = 0.85,
    b_high: float = 1.15,
    diagonal: bool = False,
) -> SdpInstance:
    """Random instance with a certified dual-norm bound.

    Every bound except b_1 = R is drawn from [b_low, b_high] with b_low > 0.
    Since y = e_1 is dual feasible with value R, any optimal dual y* has
    b^T y* <= R and hence ||y*||_1 <= R / min_j b_j, which we install as r.
    """
    if b_low <= 0:
        raise ValueError("b_low must be positive to certify the dual bound")
    C = random_hermitian(rng, n, diagonal)
    A = [np.eye(n, dtype=np.complex128)]
    b = [R]
    for _ in range(m - 1):
        A.append(random_hermitian(rng, n, diagonal))
        b.append(float(rng.uniform(b_low, b_high)))
    r = max(1.0, R / min(b[1:], default=1.0))
    return SdpInstance(A=np.stack(A), C=symmetrize(C), b=np.asarray(b), R=R, r=r)
