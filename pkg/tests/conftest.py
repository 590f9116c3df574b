import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_matrix(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_density(rng, n, rank=None):
    k = n if rank is None else rank
    G = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    W = G @ G.conj().T
    return W / np.trace(W).real


def random_unitary(rng, n):
    Q, R = np.linalg.qr(random_matrix(rng, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_normal(rng, n):
    U = random_unitary(rng, n)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return (U * z) @ U.conj().T


JORDAN = np.array([[1, 1], [0, 1]], dtype=complex)
E2 = np.diag([0, 1]).astype(complex)
