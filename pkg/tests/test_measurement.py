from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_cswap import fock
from photonic_cswap.circuits import build_cswap_simplified, compile_circuit, input_state, logical_qubit_poly
from photonic_cswap.fock import FockState, ModeRegistry
from photonic_cswap.measurement import (
    AnalyzerSetting,
    CoincidencePattern,
    CountRecord,
    MeasurementError,
    conditional_logical_state,
    equator_axis,
    normalize_per_input,
    outcome_probabilities,
    records_from_csv,
    records_to_csv,
    sample_counts,
    subtract_probabilities,
    subtract_single_source_events,
    z_axis,
)
from photonic_cswap.metrics import GHZ, state_fidelity

SPEC = build_cswap_simplified()
CIRCUIT = compile_circuit(SPEC)
OUT = SPEC.outputs
PATTERN = CoincidencePattern({OUT[r]: 1 for r in ("C1out", "T1out", "T2out", "C2out")})


def _z_settings():
    return [z_axis(OUT["C1out"]), z_axis(OUT["T1out"]), z_axis(OUT["T2out"]), equator_axis(OUT["C2out"], 0.0, project=0)]


@pytest.mark.parametrize("detector", ["pnr", "threshold"])
def test_ideal_cswap_swaps_targets_when_control_is_one(detector):
    out = fock.evolve(input_state(SPEC, (1, 1, 0)), CIRCUIT.transfer)
    probs = outcome_probabilities(out, PATTERN, _z_settings(), detector)
    assert max(probs, key=probs.get) == "101"
    assert sum(probs.values()) == pytest.approx(1 / 162)


def test_outcome_labels_follow_settings_order():
    out = fock.evolve(input_state(SPEC, (1, 1, 0)), CIRCUIT.transfer)
    s = _z_settings()
    reordered = [s[2], s[1], s[0], s[3]]
    probs = outcome_probabilities(out, PATTERN, reordered)
    assert max(probs, key=probs.get) == "101"[::-1]


def test_threshold_detector_clicks_on_bunched_photons():
    reg = ModeRegistry.from_ports(["a"])
    st_ = FockState.basis(reg, {("a", "V"): 2})
    pat = CoincidencePattern({"a": 1})
    pnr = outcome_probabilities(st_, pat, [z_axis("a")], "pnr")
    thr = outcome_probabilities(st_, pat, [z_axis("a")], "threshold")
    assert sum(pnr.values()) == 0
    assert thr["0"] == pytest.approx(1.0)


def test_threshold_rejects_both_slots_firing():
    reg = ModeRegistry.from_ports(["a"])
    st_ = FockState.basis(reg, {("a", "V"): 1, ("a", "H"): 1})
    thr = outcome_probabilities(st_, CoincidencePattern({"a": 1}), [z_axis("a")], "threshold")
    assert sum(thr.values()) == 0


def test_ghz_conditional_state_is_exact():
    c = logical_qubit_poly(SPEC.logical_inputs[0], np.array([1, 1]) / sqrt(2))
    t1 = SPEC.logical_inputs[1].one
    t2 = SPEC.logical_inputs[2].zero
    out = fock.evolve(input_state(SPEC, qubit_polys=[c, t1, t2]), CIRCUIT.transfer)
    rho, p = conditional_logical_state(
        out, PATTERN, [equator_axis(OUT["C2out"], 0.0, project=0)], [OUT["C1out"], OUT["T1out"], OUT["T2out"]]
    )
    assert p == pytest.approx(1 / 162)
    assert state_fidelity(rho, GHZ) == pytest.approx(1.0, abs=1e-9)


def test_analyzer_setting_validation():
    with pytest.raises(MeasurementError):
        AnalyzerSetting("a", theta=4.0)
    with pytest.raises(MeasurementError):
        AnalyzerSetting("a", project=2)


@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_sampling_is_deterministic_and_conserves_shots(shots, seed):
    probs = {"00": 0.1, "01": 0.2, "10": 0.3, "11": 0.4}
    a = sample_counts(probs, shots, seed, "zzz/000")
    b = sample_counts(probs, shots, seed, "zzz/000")
    assert a == b
    assert sum(r.count for r in a) == shots


def test_settings_get_independent_streams():
    probs = {"0": 0.5, "1": 0.5}
    a = sample_counts(probs, 1000, 7, "x")
    b = sample_counts(probs, 1000, 7, "y")
    assert [r.count for r in a] != [r.count for r in b]


def test_subtraction_floors_at_zero_and_reports_it():
    tot = [CountRecord("s", "0", 10), CountRecord("s", "1", 3)]
    a = [CountRecord("s", "0", 2), CountRecord("s", "1", 2)]
    b = [CountRecord("s", "0", 1), CountRecord("s", "1", 4)]
    res = subtract_single_source_events(tot, a, b)
    assert [r.count for r in res.records] == [7, 0]
    assert res.floored_events == 3


def test_subtraction_rejects_mismatched_settings():
    tot = [CountRecord("s", "0", 10)]
    with pytest.raises(MeasurementError):
        subtract_single_source_events(tot, [CountRecord("t", "0", 1)], [])


def test_probability_subtraction():
    out, floored = subtract_probabilities({"0": 0.5, "1": 0.1}, {"0": 0.1}, {"1": 0.2})
    assert out == {"0": 0.4, "1": 0.0}
    assert floored == pytest.approx(0.1)


def test_normalize_per_input_rejects_empty_rows():
    with pytest.raises(MeasurementError):
        normalize_per_input({"000": {"000": 0, "001": 0}})


def test_csv_roundtrip():
    recs = sample_counts({"0": 0.3, "1": 0.7}, 100, 5, "m1")
    assert records_from_csv(records_to_csv(recs)) == recs


def test_csv_reports_bad_line():
    text = "setting_id,outcome,count,shots,seed\ns,0,abc,1,1\n"
    with pytest.raises(MeasurementError, match="line 2"):
        records_from_csv(text)


def test_equator_axis_wraps_phase():
    assert equator_axis("a", 2 * pi).phi == pytest.approx(0.0)
