from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_cswap import fock
from photonic_cswap.elements import (
    ElementError,
    ElementSpec,
    analyzer_jones,
    beam_splitter,
    coupler_2x2,
    hwp_jones,
    lossy_mirror,
    pbs,
    phase_plate,
    ppbs,
    qwp_jones,
    wave_plate,
)
from photonic_cswap.fock import FockState, ModeRegistry

angles = st.floats(min_value=-2 * pi, max_value=2 * pi, allow_nan=False)
fractions = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@given(fractions)
def test_lossless_coupler_is_unitary(r):
    m = coupler_2x2(r)
    np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


@given(angles)
def test_wave_plates_are_unitary(theta):
    for m in (hwp_jones(theta), qwp_jones(theta)):
        np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


@given(angles)
def test_two_quarter_plates_make_a_half_plate(theta):
    q = qwp_jones(theta)
    h = hwp_jones(theta)
    prod = q @ q
    # equal up to a global phase
    phase = np.vdot(h.ravel(), prod.ravel())
    assert abs(abs(phase) - 2) < 1e-9
    np.testing.assert_allclose(prod, phase / 2 * h, atol=1e-9)


def test_hwp_at_22_5_degrees_maps_h_to_diagonal():
    out = hwp_jones(pi / 8) @ np.array([1, 0])
    np.testing.assert_allclose(out, [1 / sqrt(2), 1 / sqrt(2)], atol=1e-12)


def test_hwp_at_45_degrees_swaps_h_and_v():
    np.testing.assert_allclose(np.abs(hwp_jones(pi / 4)), [[0, 1], [1, 0]], atol=1e-12)


@given(angles, angles)
@settings(max_examples=50)
def test_analyzer_maps_axis_onto_v(theta, phi):
    # axis cos(theta/2)|V> + e^{i phi} sin(theta/2)|H>, written in (H, V) order
    axis = np.array([np.exp(1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
    out = analyzer_jones(theta, phi) @ axis
    assert abs(abs(out[1]) - 1) < 1e-9


def test_pbs_transmits_h_and_reflects_v():
    t = pbs()
    reg = t.registry
    h = fock.evolve(FockState.basis(reg, {("a", "H"): 1}), t)
    v = fock.evolve(FockState.basis(reg, {("a", "V"): 1}), t)
    assert abs(h.amplitude({("a", "H"): 1})) == pytest.approx(1)
    assert abs(v.amplitude({("b", "V"): 1})) == pytest.approx(1)


def test_ppbs_with_defaulted_transmission_is_unitary():
    assert ppbs(0.34, 0.98).flag == "unitary"
    assert ppbs(1 / 3, 1.0).flag == "unitary"


def test_ppbs_with_explicit_loss_is_subunitary():
    t = ppbs(0.34, 0.98, T_H=0.6, T_V=0.01)
    assert t.flag == "sub-unitary"


def test_attenuator_is_subunitary():
    assert lossy_mirror(1.0, 1 / 3).flag == "sub-unitary"
    assert lossy_mirror(1.0, 1.0).flag == "unitary"


def test_phase_plate_is_global_phase():
    np.testing.assert_allclose(phase_plate(pi / 3).matrix, np.exp(1j * pi / 3) * np.eye(2))


def test_beam_splitter_transmission_and_reflection_amplitudes():
    m = beam_splitter(1 / 3).matrix
    reg = ModeRegistry.from_ports(["a", "b"])
    ah, bh = reg.index(("a", "H")), reg.index(("b", "H"))
    assert abs(m[ah, ah]) ** 2 == pytest.approx(2 / 3)
    assert m[bh, ah] == pytest.approx(1j * sqrt(1 / 3))


@pytest.mark.parametrize(
    "kind,params,ports",
    [
        ("BS", {"R": 1.5}, ("a", "b")),
        ("BS", {}, ("a", "b")),
        ("BS", {"R": 0.5, "bogus": 1}, ("a", "b")),
        ("HWP", {"theta": 0}, ("a", "b")),
        ("BS", {"R": 0.5}, ("a", "a")),
        ("Lens", {}, ("a",)),
    ],
)
def test_element_validation(kind, params, ports):
    with pytest.raises(ElementError):
        ElementSpec(kind, params, ports)


def test_rt_sum_above_one_is_rejected():
    with pytest.raises((ElementError, ValueError)):
        ppbs(0.5, 0.5, T_H=0.9).matrix


def test_element_json_roundtrip_and_unknown_fields():
    e = ElementSpec("PPBS", {"R_H": 1 / 3, "R_V": 1.0}, ("a", "b"), label="X")
    assert ElementSpec.from_json(e.to_json()) == e
    bad = dict(e.to_json(), colour="red")
    with pytest.raises(ElementError):
        ElementSpec.from_json(bad)


def test_element_acts_on_every_internal_label():
    reg = ModeRegistry.from_ports(["a"], internal=(0, 1))
    m = ElementSpec("HWP", {"theta": pi / 4}, ("a",)).matrix(reg)
    for k in (0, 1):
        i, j = reg.index(("a", "H", k)), reg.index(("a", "V", k))
        assert abs(m[j, i]) == pytest.approx(1)


def test_wave_plate_builder_rejects_unknown_kind():
    with pytest.raises(ElementError):
        wave_plate("third", 0.0)
