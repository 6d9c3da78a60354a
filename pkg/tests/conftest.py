import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_density(N, rng):
    """Random full-rank density matrix."""
    m = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def random_state(N, rng):
    psi = rng.normal(size=N) + 1j * rng.normal(size=N)
    return psi / np.linalg.norm(psi)
