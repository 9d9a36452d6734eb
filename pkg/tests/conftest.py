import numpy as np
import pytest

from photonic_cswap.fock import FockState, ModeRegistry, TransferMatrix


def random_unitary(n, rng):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_fock_state(registry, n_photons, rng, n_terms=3):
    """Normalized superposition of a few random occupations with n_photons each."""
    n = len(registry)
    terms = {}
    for _ in range(n_terms):
        occ = np.bincount(rng.integers(0, n, size=n_photons), minlength=n)
        terms[tuple(int(k) for k in occ)] = complex(rng.normal(), rng.normal())
    norm = np.sqrt(sum(abs(v) ** 2 for v in terms.values()))
    return FockState(registry, {k: v / norm for k, v in terms.items()})


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def two_port_registry():
    return ModeRegistry.from_ports(["a", "b"])


def random_transfer(registry, rng, lossy=False):
    u = random_unitary(len(registry), rng)
    if lossy:
        u = u @ np.diag(rng.uniform(0.3, 1.0, size=len(registry)))
    return TransferMatrix(registry, u)
