import itertools
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_cswap import fock
from photonic_cswap.elements import beam_splitter
from photonic_cswap.fock import (
    FockState,
    ModeIndex,
    ModeRegistry,
    RegistryMismatchError,
    TransferMatrix,
    TruncationError,
)

from conftest import random_fock_state, random_transfer, random_unitary


def _assert_states_close(a, b, tol=1e-10):
    keys = set(a.terms) | set(b.terms)
    for k in keys:
        assert abs(a.terms.get(k, 0) - b.terms.get(k, 0)) <= tol, k


def test_registry_indexing_and_json_roundtrip():
    reg = ModeRegistry.from_ports(["a", "b"], internal=(0, 1))
    assert len(reg) == 8
    assert reg.index(("b", "V", 1)) == reg.index(ModeIndex("b", "V", 1))
    assert ModeRegistry.from_json(reg.to_json()) == reg


def test_registry_rejects_duplicates():
    with pytest.raises(ValueError):
        ModeRegistry((ModeIndex("a", "H"), ModeIndex("a", "H")))


def test_mode_rejects_bad_polarization():
    with pytest.raises(ValueError):
        ModeIndex("a", "D")


def test_state_rejects_overnormalized():
    reg = ModeRegistry.from_ports(["a"])
    with pytest.raises(ValueError):
        FockState(reg, {(1, 0): 1.0, (0, 1): 1.0})


def test_from_creation_bunched_amplitude():
    reg = ModeRegistry.from_ports(["a"])
    c = 2**-0.25
    st_ = FockState.from_creation(reg, [{("a", "H"): c}, {("a", "H"): c}])
    # (a^dagger)^2 |0> = sqrt(2) |2>
    assert abs(st_.amplitude({("a", "H"): 2}) - 1.0) < 1e-12


def test_fock_state_json_roundtrip(rng):
    reg = ModeRegistry.from_ports(["a", "b"])
    s = random_fock_state(reg, 3, rng)
    back = FockState.from_json(s.to_json())
    _assert_states_close(s, back, 0)


def test_hong_ou_mandel_dip(two_port_registry):
    reg = two_port_registry
    inp = FockState.basis(reg, {("a", "H"): 1, ("b", "H"): 1})
    out = fock.evolve(inp, beam_splitter(0.5))
    assert abs(out.amplitude({("a", "H"): 1, ("b", "H"): 1})) < 1e-12
    assert abs(abs(out.amplitude({("a", "H"): 2})) ** 2 - 0.5) < 1e-12


def test_permanent_known_values():
    assert fock.permanent(np.ones((3, 3))) == pytest.approx(6)
    assert fock.permanent(np.zeros((0, 0))) == 1
    m = np.array([[1, 2], [3, 4]])
    assert fock.permanent(m) == pytest.approx(10)


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_permanent_matches_naive(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert abs(fock.permanent(m) - fock.permanent_naive(m)) < 1e-9 * max(1, abs(fock.permanent_naive(m)))


def test_permanent_vs_sequential_evolution_random(rng):
    for trial in range(25):
        n_ports = int(rng.integers(1, 5))
        reg = ModeRegistry.from_ports([f"p{i}" for i in range(n_ports)])
        u = random_transfer(reg, rng, lossy=bool(trial % 2))
        s = random_fock_state(reg, int(rng.integers(1, 5)), rng)
        _assert_states_close(fock.evolve_permanent(s, u), fock.evolve_sequential(s, u))


@given(st.integers(min_value=0, max_value=2**31 - 1), st.integers(min_value=1, max_value=4))
@settings(max_examples=30, deadline=None)
def test_unitary_evolution_preserves_norm(seed, n_photons):
    rng = np.random.default_rng(seed)
    reg = ModeRegistry.from_ports(["a", "b"])
    u = TransferMatrix(reg, random_unitary(4, rng))
    s = random_fock_state(reg, n_photons, rng)
    out = fock.evolve(s, u)
    assert abs(out.norm_squared() - s.norm_squared()) < 1e-10
    assert out.photon_numbers() == s.photon_numbers()


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_evolution_composes(seed):
    rng = np.random.default_rng(seed)
    reg = ModeRegistry.from_ports(["a", "b"])
    u1 = random_transfer(reg, rng)
    u2 = random_transfer(reg, rng, lossy=True)
    s = random_fock_state(reg, 2, rng)
    _assert_states_close(fock.evolve(fock.evolve(s, u1), u2), fock.evolve(s, u1.then(u2)))


def test_lossy_evolution_loses_norm(rng):
    reg = ModeRegistry.from_ports(["a"])
    u = TransferMatrix(reg, np.diag([sqrt(0.5), 1.0]))
    s = FockState.basis(reg, {("a", "H"): 2})
    assert fock.evolve(s, u).norm_squared() == pytest.approx(0.25)


def test_dilation_is_unitary_and_reproduces_lossy_branch(rng):
    reg = ModeRegistry.from_ports(["a", "b"])
    u = random_transfer(reg, rng, lossy=True)
    full, ext = fock.dilate(u)
    assert full.is_unitary
    np.testing.assert_allclose(full.matrix[: len(reg), : len(reg)], u.matrix, atol=1e-12)
    s = random_fock_state(reg, 2, rng)
    out = fock.evolve(fock.lift_state(s, ext), full)
    assert out.norm_squared() == pytest.approx(s.norm_squared())
    lossy = fock.evolve(s, u)
    for occ, amp in lossy.terms.items():
        assert abs(out.terms[occ + (0,) * (len(ext) - len(reg))] - amp) < 1e-10


def test_transfer_rejects_amplification():
    reg = ModeRegistry.from_ports(["a"])
    with pytest.raises(ValueError):
        TransferMatrix(reg, 1.1 * np.eye(2))


def test_truncation_is_an_error():
    reg = ModeRegistry.from_ports(["a"])
    s = FockState.basis(reg, {("a", "H"): 3})
    with pytest.raises(TruncationError):
        fock.evolve(s, TransferMatrix.identity(reg), n_max=2)


def test_registry_mismatch_is_an_error():
    a = ModeRegistry.from_ports(["a"])
    b = ModeRegistry.from_ports(["b"])
    with pytest.raises(RegistryMismatchError):
        fock.evolve(FockState.vacuum(a), TransferMatrix.identity(b))


def test_product_of_factors_accepts_internal_labels():
    reg = ModeRegistry.from_ports(["a"], internal=(0, 1))
    s = fock.product_of_factors(reg, [[(1.0, [("a", "H", 0)])], [(1.0, [("a", "H", 1)])]])
    assert s.amplitude({("a", "H", 0): 1, ("a", "H", 1): 1}) == pytest.approx(1.0)


def test_distinguishable_photons_do_not_interfere():
    reg = ModeRegistry.from_ports(["a", "b"], internal=(0, 1))
    inp = FockState.basis(reg, {("a", "H", 0): 1, ("b", "H", 1): 1})
    bs = TransferMatrix(reg, _embed_bs(reg))
    out = fock.evolve(inp, bs)
    coinc = sum(
        abs(out.amplitude({("a", "H", i): 1, ("b", "H", j): 1})) ** 2 for i, j in itertools.product((0, 1), repeat=2)
    )
    assert coinc == pytest.approx(0.5)


def _embed_bs(reg):
    from photonic_cswap.elements import ElementSpec

    return ElementSpec("BS", {"R": 0.5}, ("a", "b")).matrix(reg)
