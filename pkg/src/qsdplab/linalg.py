"""Dense Hermitian linear algebra primitives.

Eigendecompositions, matrix functions, the Gibbs map, norms and spectral
projectors.  Everything here is the exact ground truth that the simulated
sampling and encoding layers are checked against.  All matrices are dense
complex128; the supported regime is dimension <= 256.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractViolation, DomainError, IllConditionedThreshold

# Anti-Hermitian part above this is rejected outright; below it we symmetrize.
HERMITIAN_REJECT = 1e-8
PSD_ATOL = 1e-10
IDEMPOTENT_ATOL = 1e-10
THRESHOLD_ATOL = 1e-12


def _as_matrix(H) -> np.ndarray:
    if isinstance(H, (HermitianOperator, DensityOperator, Projector)):
        return H.mat
    return np.asarray(H, dtype=np.complex128)


def hermitian_part(A: np.ndarray) -> np.ndarray:
    """Return (A + A^dagger) / 2."""
    A = np.asarray(A, dtype=np.complex128)
    return (A + A.conj().T) / 2


def symmetrize(A) -> np.ndarray:
    """Symmetrize a matrix, rejecting anything whose anti-Hermitian part is large."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {A.shape}")
    skew = np.linalg.norm(A - A.conj().T, 2) / 2
    if skew > HERMITIAN_REJECT:
        raise ContractViolation(
            f"anti-Hermitian part has norm {skew:.3e} > {HERMITIAN_REJECT:.0e}"
        )
    return hermitian_part(A)


@dataclass(frozen=True)
class HermitianOperator:
    """A validated dense Hermitian matrix."""

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", symmetrize(self.mat))
        self.mat.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.mat, dtype=dtype)


@dataclass(frozen=True)
class DensityOperator:
    """A psd matrix of trace at most one; ``normalized`` asserts trace == 1."""

    mat: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        mat = symmetrize(self.mat)
        object.__setattr__(self, "mat", mat)
        self.mat.setflags(write=False)
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < -PSD_ATOL:
            raise ContractViolation(f"not psd: min eigenvalue {lo:.3e}")
        tr = float(np.trace(mat).real)
        if tr > 1 + PSD_ATOL:
            raise ContractViolation(f"trace {tr:.12f} exceeds 1")
        if self.normalized and abs(tr - 1.0) > PSD_ATOL:
            raise ContractViolation(f"normalized flag set but trace is {tr:.12f}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.mat, dtype=dtype)


@dataclass(frozen=True)
class Projector:
    """An orthogonal projector with its rank."""

    mat: np.ndarray
    rank: int = field(default=-1)

    def __post_init__(self):
        mat = symmetrize(self.mat)
        object.__setattr__(self, "mat", mat)
        self.mat.setflags(write=False)
        if np.linalg.norm(mat @ mat - mat, 2) > IDEMPOTENT_ATOL:
            raise ContractViolation("matrix is not idempotent")
        rank = int(round(float(np.trace(mat).real)))
        if self.rank == -1:
            object.__setattr__(self, "rank", rank)
        elif self.rank != rank:
            raise ContractViolation(f"declared rank {self.rank} != trace rank {rank}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.mat, dtype=dtype)


def matrix_function(H, f: Callable[[float], float]) -> HermitianOperator:
    """Apply a real scalar function to the eigenvalues of a Hermitian matrix.

    Raises DomainError naming the offending eigenvalue if f is not finite there.
    """
    mat = symmetrize(_as_matrix(H))
    w, V = np.linalg.eigh(mat)
    fw = np.empty_like(w)
    with np.errstate(all="ignore"):
        for i, lam in enumerate(w):
            try:
                val = float(f(float(lam)))
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise DomainError(f"f undefined at eigenvalue {lam!r}: {exc}") from exc
            if not np.isfinite(val):
                raise DomainError(f"f not finite at eigenvalue {lam!r} (got {val!r})")
            fw[i] = val
    return HermitianOperator((V * fw) @ V.conj().T)


def gibbs_state(H) -> DensityOperator:
    """Normalized exp(-H)/Tr(exp(-H)) for Hermitian H.

    Eigenvalues are shifted by their minimum before exponentiation, so the map
    stays finite for spectral ranges up to ~700 and is invariant under H -> H+cI.
    """
    mat = symmetrize(_as_matrix(H))
    w, V = np.linalg.eigh(mat)
    ew = np.exp(-(w - w.min()))
    rho = (V * ew) @ V.conj().T
    rho = hermitian_part(rho / np.trace(rho).real)
    return DensityOperator(rho, normalized=True)


def trace_norm(A) -> float:
    """||A||_1 for Hermitian A, i.e. the sum of absolute eigenvalues."""
    return float(np.abs(np.linalg.eigvalsh(_as_matrix(A))).sum())


def trace_distance(rho, sigma) -> float:
    """(1/2)||rho - sigma||_1 via the eigenvalues of the difference."""
    a = _as_matrix(rho)
    b = _as_matrix(sigma)
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    return 0.5 * trace_norm(a - b)


def min_eigenvalue(H) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(np.linalg.eigvalsh(_as_matrix(H))[0])


def threshold_projector(H, q: float) -> Projector:
    """Projector onto the span of eigenvectors of H with eigenvalue > q.

    The complement projector is I minus the result.  A cut within 1e-12 of the
    spectrum is refused; callers must supply a separated threshold.
    """
    mat = symmetrize(_as_matrix(H))
    w, V = np.linalg.eigh(mat)
    gap = float(np.abs(w - q).min())
    if gap <= THRESHOLD_ATOL:
        raise IllConditionedThreshold(
            f"threshold {q} is within {gap:.3e} of an eigenvalue"
        )
    keep = w > q
    Vk = V[:, keep]
    return Projector(Vk @ Vk.conj().T, rank=int(keep.sum()))
