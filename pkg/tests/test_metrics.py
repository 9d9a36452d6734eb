from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_cswap.metrics import (
    BIPARTITE,
    FREDKIN_MAP,
    GENUINE,
    GHZ,
    SEPARABLE,
    CorrelationResult,
    Estimate,
    MetricsError,
    MetricsReport,
    TruthTable,
    X,
    bootstrap,
    check_density_matrix,
    clamp_unit,
    coherence_C,
    coherence_from_rho,
    correlations_from_rho,
    entanglement_class,
    gaussian_confidence,
    ghz_fidelity,
    kron,
    m_correlations,
    m_operator,
    m_weights,
    process_fidelity_estimate,
    truth_table_fidelity,
)

RHO_GHZ = np.outer(GHZ, GHZ.conj())


def test_three_m_operators_average_to_the_coherence_operator():
    avg = sum(m_operator(k) for k in ("M1", "M2", "M3")) / 3
    target = np.zeros((8, 8), dtype=complex)
    target[2, 5] = target[5, 2] = 1
    np.testing.assert_allclose(avg, target, atol=1e-12)


def test_m3_is_xxx():
    np.testing.assert_allclose(m_operator("M3"), kron(X, X, X), atol=1e-12)


def test_m_weights_are_signs():
    for k in ("M1", "M2", "M3"):
        w = m_weights(k)
        assert set(np.unique(w)) <= {-1.0, 1.0}
    np.testing.assert_array_equal(m_weights("M2"), [-1, 1, 1, -1, 1, -1, -1, 1])


def test_ghz_has_unit_correlations_and_coherence():
    corr = correlations_from_rho(RHO_GHZ)
    for m in (corr.m0, corr.m1, corr.m2, corr.m3):
        assert m.value == pytest.approx(1.0)
    assert coherence_from_rho(RHO_GHZ) == pytest.approx(1.0)
    assert coherence_C(corr).value == pytest.approx(1.0)


def test_correlations_from_outcome_probabilities_match_rho():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    from photonic_cswap.metrics import M_DEFINITIONS, equator_state

    data = {"Z": {format(i, "03b"): float(rho[i, i].real) for i in range(8)}}
    for key, (_, _, axes) in M_DEFINITIONS.items():
        probs = {}
        for idx in range(8):
            bits = [(idx >> (2 - q)) & 1 for q in range(3)]
            b = kron(*(equator_state(a, k)[:, None] for a, k in zip(axes, bits))).ravel()
            probs[format(idx, "03b")] = float(np.vdot(b, rho @ b).real)
        data[key] = probs
    from_data = m_correlations(data)
    from_rho = correlations_from_rho(rho)
    for k in ("m0", "m1", "m2", "m3"):
        assert getattr(from_data, k).value == pytest.approx(getattr(from_rho, k).value, abs=1e-12)


def test_missing_setting_is_an_error():
    with pytest.raises(MetricsError):
        m_correlations({"Z": {}, "M1": {}})


@pytest.mark.parametrize("c,cls", [(0.9, GENUINE), (0.5, BIPARTITE), (0.3, BIPARTITE), (0.25, SEPARABLE), (-0.2, SEPARABLE)])
def test_entanglement_classes(c, cls):
    assert entanglement_class(c) == cls


def test_entanglement_class_rejects_out_of_range():
    with pytest.raises(MetricsError):
        entanglement_class(1.5)


def test_truth_table_fidelity_and_counts():
    perfect = np.eye(8)[list(FREDKIN_MAP)]
    assert truth_table_fidelity(TruthTable(perfect)).value == 1.0
    tt = TruthTable.from_counts(perfect * 100 + 1)
    f = truth_table_fidelity(tt)
    assert 0.9 < f.value < 1 and f.sigma > 0


def test_truth_table_rejects_empty_row():
    with pytest.raises(MetricsError):
        TruthTable.from_counts(np.zeros((8, 8)))


def test_fidelity_combinations():
    assert ghz_fidelity(0.927, 0.689).value == pytest.approx(0.808)
    assert process_fidelity_estimate(0.85, 0.689).value == pytest.approx(0.7695)
    with pytest.raises(MetricsError):
        ghz_fidelity(1.2, 0.5)


def test_clamp_records_event():
    log = []
    assert clamp_unit(Estimate(1.02, 0.1), log, "F").value == 1.0
    assert log and "F" in log[0]


@given(st.floats(-1, 1), st.floats(0.001, 1), st.floats(-1, 1))
def test_gaussian_confidence_is_a_probability(c, s, t):
    p = gaussian_confidence(c, s, t)
    assert 0 <= p <= 1
    if c > t:
        assert p >= 0.5


def test_check_density_matrix():
    with pytest.raises(MetricsError):
        check_density_matrix(np.diag([1.1, -0.1]))
    with pytest.raises(MetricsError):
        check_density_matrix(np.array([[0.5, 1], [0, 0.5]]))


def test_bootstrap_is_seeded():
    counts = {"a": np.array([40, 60])}
    stat = lambda c: c["a"][0] / c["a"].sum()  # noqa: E731
    a = bootstrap(counts, stat, 100, seed=1)
    b = bootstrap(counts, stat, 100, seed=1)
    assert a == b
    assert a.sigma == pytest.approx(sqrt(0.24 / 100), rel=0.3)


def test_report_json_is_stable_and_complete():
    corr = CorrelationResult(Estimate(0.927, 0.03), Estimate(0.615, 0.1), Estimate(0.943, 0.1), Estimate(0.508, 0.1))
    c = coherence_C(corr)
    r = MetricsReport(f_zzz=Estimate(0.85, 0.03), m=corr, c=c, f_ghz=ghz_fidelity(corr.m0, c), verdict=entanglement_class(c.value))
    text = r.to_json()
    assert text == r.to_json()
    for key in ("F_zzz", "C", "F_GHZ", "M", "provenance"):
        assert key in text
    assert "C " in r.to_text()


@given(st.floats(0, 2 * pi), st.floats(0, pi))
@settings(max_examples=30)
def test_local_phase_rotation_changes_coherence_not_populations(a, theta):
    # a Z rotation on one qubit rotates the 010/101 coherence
    psi = np.cos(theta / 2) * np.eye(8)[2] + np.sin(theta / 2) * np.exp(1j * a) * np.eye(8)[5]
    rho = np.outer(psi, psi.conj())
    assert coherence_from_rho(rho) == pytest.approx(np.sin(theta) * np.cos(a), abs=1e-12)
