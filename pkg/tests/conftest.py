import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_hermitian(rng, n, norm=1.0):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    M = (M + M.conj().T) / 2
    return M / np.linalg.norm(M, 2) * norm


def random_density(rng, n, trace=1.0):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = M @ M.conj().T
    return rho / np.trace(rho).real * trace


@pytest.fixture
def herm():
    return random_hermitian


@pytest.fixture
def density():
    return random_density
