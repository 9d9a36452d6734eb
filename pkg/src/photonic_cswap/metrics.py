"""Figures of merit for the gate: truth tables, three-photon coherence, fidelities.

Logical basis order for three qubits is (C, T1, T2) with index ``4c + 2t1 + t2``.
The target GHZ state is ``(|010> + |101>)/sqrt(2)``.

Uncertainties are first-order Gaussian (one standard deviation) unless a
bootstrap is requested.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce
from math import pi, sqrt
from typing import Callable, Mapping, Sequence

import numpy as np

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)

GHZ = np.zeros(8, dtype=complex)
GHZ[[2, 5]] = 1 / sqrt(2)

FREDKIN_MAP = (0, 1, 2, 3, 4, 6, 5, 7)
CNOT_MAP = (0, 1, 3, 2)
CNOT_REVERSED_MAP = (0, 3, 2, 1)

GENUINE = "requires-genuine-tripartite"
BIPARTITE = "requires-bipartite"
SEPARABLE = "consistent-with-separable"


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class Estimate:
    value: float
    sigma: float = 0.0

    def __iter__(self):
        yield self.value
        yield self.sigma

    def __format__(self, spec):
        spec = spec or ".3f"
        return f"{self.value:{spec}} +/- {self.sigma:{spec}}"


def kron(*ops):
    return reduce(np.kron, ops)


# --------------------------------------------------------------------------
# truth tables


@dataclass
class TruthTable:
    """Rows are inputs, columns outputs; entries are probabilities."""

    probabilities: np.ndarray
    sigma: np.ndarray | None = None
    labels: Sequence[str] | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise MetricsError(f"truth table must be square, got {p.shape}")
        self.probabilities = p
        if self.sigma is None:
            self.sigma = np.zeros_like(p)
        n = int(round(math.log2(p.shape[0])))
        if self.labels is None:
            self.labels = [format(i, f"0{n}b") for i in range(p.shape[0])]

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> "TruthTable":
        """Row-normalize integer counts with multinomial standard errors."""
        c = np.asarray(counts, dtype=float)
        tot = c.sum(axis=1, keepdims=True)
        if np.any(tot <= 0):
            bad = int(np.flatnonzero(tot.ravel() <= 0)[0])
            raise MetricsError(f"input row {bad} has no counts")
        p = c / tot
        return cls(p, np.sqrt(p * (1 - p) / tot))


def truth_table_fidelity(tt: TruthTable, ideal: Sequence[int] = FREDKIN_MAP) -> Estimate:
    """Average probability of the correct output over all inputs."""
    rows = np.arange(len(ideal))
    good = tt.probabilities[rows, list(ideal)]
    sig = tt.sigma[rows, list(ideal)]
    return Estimate(float(good.mean()), float(np.sqrt(np.sum(sig**2)) / len(ideal)))


# --------------------------------------------------------------------------
# correlation operators


def s_operator(phi: float) -> np.ndarray:
    """S(phi) = X cos(phi) + Y sin(phi)."""
    return np.cos(phi) * X + np.sin(phi) * Y


# (operator angles, sign, analyzer angles used to measure it)
M_DEFINITIONS = {
    "M1": ((-pi / 3, pi / 3, -pi / 3), -1.0, (-pi / 3, pi / 3, -pi / 3)),
    "M2": ((-2 * pi / 3, 2 * pi / 3, -2 * pi / 3), 1.0, (pi / 3, -pi / 3, pi / 3)),
    "M3": ((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 0.0)),
}


def m_operator(name: str) -> np.ndarray:
    angles, sign, _ = M_DEFINITIONS[name]
    return sign * kron(*(s_operator(a) for a in angles))


def equator_state(phi: float, outcome: int) -> np.ndarray:
    """Eigenvector of S(phi) in the (|0>, |1>) basis; outcome 0 is eigenvalue +1."""
    e = np.exp(1j * phi)
    v = np.array([1, e]) if outcome == 0 else np.array([1, -e])
    return v / sqrt(2)


def m_weights(name: str) -> np.ndarray:
    """Weight of each outcome ijk in the analyzer basis of ``name``.

    Derived as <b_ijk|M|b_ijk>; the analyzer basis diagonalizes M so these
    are exactly +1 or -1.
    """
    _, _, axes = M_DEFINITIONS[name]
    op = m_operator(name)
    w = np.empty(8)
    for idx in range(8):
        bits = [(idx >> (2 - q)) & 1 for q in range(3)]
        b = kron(*(equator_state(a, k)[:, None] for a, k in zip(axes, bits))).ravel()
        val = np.vdot(b, op @ b)
        if abs(val.imag) > 1e-12 or abs(abs(val.real) - 1) > 1e-12:
            raise MetricsError(f"analyzer basis does not diagonalize {name}")
        w[idx] = round(val.real)
    return w


M0_WEIGHTS = np.array([0, 0, 1, 0, 0, 1, 0, 0], dtype=float)


@dataclass(frozen=True)
class CorrelationResult:
    m0: Estimate
    m1: Estimate
    m2: Estimate
    m3: Estimate

    def as_dict(self):
        return {k: tuple(getattr(self, k)) for k in ("m0", "m1", "m2", "m3")}


def _weighted(p: np.ndarray, w: np.ndarray, n: float | None) -> Estimate:
    tot = p.sum()
    if tot <= 0:
        raise MetricsError("setting has no coincidences")
    p = p / tot
    val = float(w @ p)
    sig = 0.0 if n is None else sqrt(max(float((w**2) @ p) - val**2, 0.0) / n)
    return Estimate(val, sig)


def _as_vector(data) -> np.ndarray:
    if isinstance(data, Mapping):
        return np.array([float(data.get(format(i, "03b"), 0.0)) for i in range(8)])
    v = np.asarray(data, dtype=float)
    if v.shape != (8,):
        raise MetricsError("expected 8 outcome probabilities or counts")
    return v


def m_correlations(settings: Mapping[str, object], counts: bool = False) -> CorrelationResult:
    """Correlations from per-setting outcome data.

    ``settings`` maps "Z", "M1", "M2", "M3" to outcome maps (bit string to
    probability or count). With ``counts=True`` the row totals set the
    statistical errors.
    """
    missing = {"Z", "M1", "M2", "M3"} - set(settings)
    if missing:
        raise MetricsError(f"missing settings {sorted(missing)}")
    out = {}
    for key, w in (("Z", M0_WEIGHTS), ("M1", m_weights("M1")), ("M2", m_weights("M2")), ("M3", m_weights("M3"))):
        v = _as_vector(settings[key])
        out[key] = _weighted(v, w, v.sum() if counts else None)
    return CorrelationResult(out["Z"], out["M1"], out["M2"], out["M3"])


def correlations_from_rho(rho: np.ndarray) -> CorrelationResult:
    rho = np.asarray(rho)
    m0 = float((rho[2, 2] + rho[5, 5]).real)
    vals = [float(np.trace(rho @ m_operator(k)).real) for k in ("M1", "M2", "M3")]
    return CorrelationResult(Estimate(m0), *(Estimate(v) for v in vals))


def coherence_C(corr: CorrelationResult) -> Estimate:
    """Mean of the three correlations with uncorrelated error propagation."""
    ms = (corr.m1, corr.m2, corr.m3)
    return Estimate(sum(m.value for m in ms) / 3, sqrt(sum(m.sigma**2 for m in ms)) / 3)


def coherence_from_rho(rho: np.ndarray) -> float:
    """C = 2 Re <010|rho|101>."""
    return float(2 * np.asarray(rho)[2, 5].real)


def entanglement_class(C: float) -> str:
    if not -1 - 1e-12 <= C <= 1 + 1e-12:
        raise MetricsError(f"C={C} outside [-1, 1]")
    if C > 0.5:
        return GENUINE
    if C > 0.25:
        return BIPARTITE
    return SEPARABLE


def _estimate(x) -> Estimate:
    if isinstance(x, Estimate):
        return x
    if isinstance(x, (tuple, list)):
        return Estimate(float(x[0]), float(x[1]))
    return Estimate(float(x))


def ghz_fidelity(m0, c) -> Estimate:
    """(M0 + C)/2."""
    m0, c = _estimate(m0), _estimate(c)
    if not -1e-12 <= m0.value <= 1 + 1e-12:
        raise MetricsError("M0 must lie in [0, 1]")
    return Estimate((m0.value + c.value) / 2, sqrt(m0.sigma**2 + c.sigma**2) / 2)


def process_fidelity_estimate(f_zzz, c) -> Estimate:
    """(F_zzz + C)/2.

    A lower-bound style estimate that assumes errors seen in the classical
    truth table do not add coherence.
    """
    f, c = _estimate(f_zzz), _estimate(c)
    return Estimate((f.value + c.value) / 2, sqrt(f.sigma**2 + c.sigma**2) / 2)


def clamp_unit(x: Estimate, log: list | None = None, name: str = "") -> Estimate:
    v = min(max(x.value, 0.0), 1.0)
    if v != x.value and log is not None:
        log.append(f"{name} clamped from {x.value:.6g}")
    return Estimate(v, x.sigma)


# --------------------------------------------------------------------------
# density-matrix figures


def check_density_matrix(rho, tol: float = 1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise MetricsError("density matrix must be square")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise MetricsError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise MetricsError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise MetricsError("density matrix has negative eigenvalues")
    return rho


def state_fidelity(rho, target) -> float:
    rho = check_density_matrix(rho)
    t = np.asarray(target, dtype=complex)
    t = t / np.linalg.norm(t)
    return float(np.vdot(t, rho @ t).real)


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = check_density_matrix(rho)
    if rho.shape != (4, 4):
        raise MetricsError("concurrence needs a 4x4 density matrix")
    yy = np.kron(Y, Y)
    rt = yy @ rho.conj() @ yy
    ev = np.sqrt(np.clip(np.sort(np.linalg.eigvals(rho @ rt).real)[::-1], 0, None))
    return float(max(0.0, ev[0] - ev[1] - ev[2] - ev[3]))


def gaussian_confidence(C: float, sigma: float, threshold: float) -> float:
    """P(X > threshold) for X ~ Normal(C, sigma^2)."""
    if sigma < 0:
        raise MetricsError("sigma must be positive")
    if sigma == 0:
        return 1.0 if C > threshold else (0.5 if C == threshold else 0.0)
    return 0.5 * math.erfc((threshold - C) / (sigma * sqrt(2)))


# --------------------------------------------------------------------------
# bootstrap


def bootstrap(
    counts: Mapping[str, np.ndarray],
    statistic: Callable[[Mapping[str, np.ndarray]], float],
    replicas: int = 200,
    seed: int = 0,
) -> Estimate:
    """Parametric multinomial bootstrap of ``statistic`` over per-setting counts."""
    keys = sorted(counts)
    vals = []
    for r in range(replicas):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
        sample = {}
        for k in keys:
            c = np.asarray(counts[k], dtype=float)
            n = int(c.sum())
            sample[k] = rng.multinomial(n, c / n) if n > 0 else c
        vals.append(statistic(sample))
    return Estimate(float(statistic(counts)), float(np.std(vals, ddof=1)))


# --------------------------------------------------------------------------
# report


@dataclass
class MetricsReport:
    f_zzz: Estimate | None = None
    m: CorrelationResult | None = None
    c: Estimate | None = None
    f_ghz: Estimate | None = None
    f_process: Estimate | None = None
    verdict: str | None = None
    success_probability: Mapping[str, float] | None = None
    truth_table: np.ndarray | None = None
    provenance: str = "raw"
    clamp_events: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def est(e):
            return None if e is None else {"value": e.value, "sigma": e.sigma}

        return {
            "provenance": self.provenance,
            "F_zzz": est(self.f_zzz),
            "M": None if self.m is None else {k: est(getattr(self.m, k)) for k in ("m0", "m1", "m2", "m3")},
            "C": est(self.c),
            "F_GHZ": est(self.f_ghz),
            "F_process": est(self.f_process),
            "entanglement_class": self.verdict,
            "success_probability": self.success_probability,
            "truth_table": None if self.truth_table is None else np.asarray(self.truth_table).tolist(),
            "clamp_events": list(self.clamp_events),
            "extra": self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(_round_floats(self.to_dict()), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"provenance: {self.provenance}"]
        rows = [("F_zzz", self.f_zzz), ("C", self.c), ("F_GHZ", self.f_ghz), ("F_process", self.f_process)]
        if self.m is not None:
            rows[1:1] = [("M0", self.m.m0), ("M1", self.m.m1), ("M2", self.m.m2), ("M3", self.m.m3)]
        for name, e in rows:
            if e is not None:
                lines.append(f"{name:<10}{e.value:8.4f} +/- {e.sigma:.4f}")
        if self.verdict:
            lines.append(f"class     {self.verdict}")
        if self.truth_table is not None:
            tt = np.asarray(self.truth_table)
            n = int(round(math.log2(tt.shape[0])))
            labels = [format(i, f"0{n}b") for i in range(tt.shape[0])]
            lines.append("truth table (rows: input, columns: output)")
            lines.append("      " + " ".join(f"{lab:>6}" for lab in labels))
            for lab, row in zip(labels, tt):
                lines.append(f"{lab:>5} " + " ".join(f"{x:6.3f}" for x in row))
        for ev in self.clamp_events:
            lines.append(f"note: {ev}")
        return "\n".join(lines) + "\n"


def _round_floats(obj, digits: int = 12):
    # fixed precision keeps the JSON byte-stable across platforms
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


__all__ = [
    "CorrelationResult",
    "Estimate",
    "MetricsReport",
    "TruthTable",
    "bootstrap",
    "coherence_C",
    "coherence_from_rho",
    "concurrence",
    "correlations_from_rho",
    "entanglement_class",
    "gaussian_confidence",
    "ghz_fidelity",
    "m_correlations",
    "m_operator",
    "m_weights",
    "process_fidelity_estimate",
    "s_operator",
    "state_fidelity",
    "truth_table_fidelity",
]
