"""Polarization analysis, coincidence post-selection, sampling and subtraction.

An analyzer on a port is modelled as a direct projection onto a Bloch axis:
``|n> = cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>`` with |0> = V and
|1> = H. Outcome 0 is ``|n>``, outcome 1 its orthogonal partner. It is
applied as a polarization rotation that brings ``|n>`` onto V, after which
photons in V give outcome 0 and photons in H give outcome 1.

Two detector models are supported:

* ``"pnr"`` counts photons exactly: a port satisfies the pattern when it holds
  exactly the required number of photons.
* ``"threshold"`` uses one bucket detector per analyzer output. A coincidence
  needs exactly one of the two detectors of each analyzed port to fire; a
  projected port has a detector only behind the selected outcome.

For ideal four-photon inputs the two models agree.
"""

from __future__ import annotations

import csv
import io
import itertools
import zlib
from dataclasses import dataclass, field
from math import pi
from typing import Mapping, Sequence

import numpy as np

from . import fock
from .elements import ElementSpec
from .fock import FockState, TransferMatrix


class MeasurementError(ValueError):
    pass


@dataclass(frozen=True)
class AnalyzerSetting:
    """Projective polarization analyzer on one (line) port.

    ``project`` keeps only the given outcome (0 or 1) and removes the port
    from the outcome label, as done for a polarizer in front of a single
    detector.
    """

    port: str
    theta: float = 0.0
    phi: float = 0.0
    project: int | None = None

    def __post_init__(self):
        if not -1e-12 <= self.theta <= pi + 1e-12:
            raise MeasurementError(f"theta={self.theta} outside [0, pi]")
        if not -pi - 1e-12 <= self.phi <= pi + 1e-12:
            raise MeasurementError(f"phi={self.phi} outside [-pi, pi]")
        if self.project not in (None, 0, 1):
            raise MeasurementError("project must be None, 0 or 1")

    def element(self) -> ElementSpec:
        return ElementSpec("Analyzer", {"theta": self.theta, "phi": self.phi}, (self.port,))

    def axis_state(self) -> np.ndarray:
        """Axis as a (H, V) Jones vector."""
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        return np.array([np.exp(1j * self.phi) * s, c])


def z_axis(port: str) -> AnalyzerSetting:
    return AnalyzerSetting(port, 0.0, 0.0)


def equator_axis(port: str, phi: float, project=None) -> AnalyzerSetting:
    """Analyzer measuring S(phi) = X cos(phi) + Y sin(phi); outcome 0 is +1."""
    phi = (phi + pi) % (2 * pi) - pi
    return AnalyzerSetting(port, pi / 2, phi, project)


@dataclass(frozen=True)
class CoincidencePattern:
    """Required photon number per output port (line label)."""

    counts: Mapping[str, int]

    def __post_init__(self):
        if any(v < 0 for v in self.counts.values()):
            raise MeasurementError("pattern counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class CountRecord:
    setting_id: str
    outcome: str
    count: int
    shots: int = 0
    seed: int | None = None

    def __post_init__(self):
        if self.count < 0:
            raise MeasurementError("counts must be non-negative")


def analyzer_transfer(registry, settings: Sequence[AnalyzerSetting]) -> TransferMatrix:
    m = np.eye(len(registry), dtype=complex)
    for s in settings:
        m = s.element().matrix(registry) @ m
    return TransferMatrix(registry, m)


def _slot_indices(registry, port):
    """Mode indices of the outcome-0 (V) and outcome-1 (H) slots of a port."""
    slots = ([], [])
    for i, m in enumerate(registry.modes):
        if m.spatial == port:
            slots[0 if m.polarization == "V" else 1].append(i)
    return np.array(slots[0], dtype=int), np.array(slots[1], dtype=int)


def _outcome_table(state: FockState, pattern, settings, detector):
    """Vectorized classification of analyzed terms into outcome labels."""
    reg = state.registry
    if not state.terms:
        return {}
    occ = np.array(list(state.terms), dtype=int)
    prob = np.abs(np.array(list(state.terms.values()))) ** 2
    ok = np.ones(len(occ), dtype=bool)
    by_port = {}
    for port, need in pattern.counts.items():
        zero, one = _slot_indices(reg, port)
        n0 = occ[:, zero].sum(axis=1)
        n1 = occ[:, one].sum(axis=1)
        setting = next((s for s in settings if s.port == port), None)
        if detector == "pnr":
            ok &= (n0 + n1) == need
            if setting is not None and need == 1:
                if setting.project is not None:
                    ok &= (n1 if setting.project else n0) == 1
                else:
                    by_port[port] = n1 > 0
        elif detector == "threshold":
            if need == 0:
                ok &= (n0 + n1) == 0
                continue
            if setting is None:
                ok &= (n0 + n1) > 0
            elif setting.project is not None:
                ok &= (n1 if setting.project else n0) > 0
            else:
                ok &= (n0 > 0) ^ (n1 > 0)
                by_port[port] = n1 > 0
        else:
            raise MeasurementError(f"unknown detector model {detector!r}")
    labelled = [s.port for s in settings if s.project is None]
    if set(labelled) != set(by_port):
        raise MeasurementError("analyzed ports must require exactly one photon each")
    bits = [by_port[p] for p in labelled]
    return ok, bits, prob


def outcome_probabilities(
    state: FockState,
    pattern: CoincidencePattern,
    settings: Sequence[AnalyzerSetting],
    detector: str = "pnr",
    analyzed: bool = False,
) -> dict[str, float]:
    """Absolute probabilities of every analyzer outcome string under ``pattern``.

    Labels follow the order of the non-projecting ``settings``. Internal
    labels are traced out. If ``analyzed`` is true the analyzer rotations are
    assumed to be already applied to ``state``.
    """
    labelled = [s for s in settings if s.project is None]
    labels = ["".join(b) for b in itertools.product("01", repeat=len(labelled))]
    if pattern.total > state.max_photons() or not state.terms:
        return {k: 0.0 for k in labels}
    if not analyzed:
        state = fock.evolve(state, analyzer_transfer(state.registry, settings), max(state.max_photons(), 1))
    table = _outcome_table(state, pattern, settings, detector)
    if not table:
        return {k: 0.0 for k in labels}
    ok, bits, prob = table
    code = np.zeros(len(prob), dtype=int)
    for b in bits:
        code = 2 * code + b.astype(int)
    sums = np.bincount(code[ok], weights=prob[ok], minlength=2 ** len(bits))
    return {k: float(v) for k, v in zip(labels, sums)}


def conditional_logical_state(
    state: FockState,
    pattern: CoincidencePattern,
    projections: Sequence[AnalyzerSetting],
    logical_ports: Sequence[str],
):
    """Density matrix of the logical qubits on ``logical_ports`` after post-selection.

    Every logical port must receive exactly one photon; ``projections`` fix the
    outcome on the other analyzed ports. Returns ``(rho, p)``; a zero branch
    gives ``(None, 0.0)``.
    """
    if any(s.project is None for s in projections):
        raise MeasurementError("conditional state needs projecting analyzers only")
    st = fock.evolve(state, analyzer_transfer(state.registry, projections), max(state.max_photons(), 1))
    reg = st.registry
    port_of = [m.spatial for m in reg.modes]
    n = len(logical_ports)
    blocks: dict = {}
    proj = {s.port: s.project for s in projections}
    for occ, amp in st.terms.items():
        per_port = {}
        for i, k in enumerate(occ):
            if k:
                per_port.setdefault(port_of[i], []).extend([i] * k)
        if any(len(per_port.get(p, ())) != c for p, c in pattern.counts.items()):
            continue
        if set(per_port) - set(pattern.counts):
            continue
        bad = False
        for p, outcome in proj.items():
            for i in per_port.get(p, ()):
                if (reg.modes[i].polarization == "H") != bool(outcome):
                    bad = True
        if bad:
            continue
        idx = 0
        env = []
        for p in logical_ports:
            (i,) = per_port[p]
            idx = 2 * idx + (reg.modes[i].polarization == "H")
            env.append(reg.modes[i].internal)
        for p in sorted(per_port):
            if p not in logical_ports:
                env.append(tuple(per_port[p]))
        vec = blocks.setdefault(tuple(env), np.zeros(2**n, dtype=complex))
        vec[idx] += amp
    rho = sum(np.outer(v, v.conj()) for v in blocks.values()) if blocks else None
    if rho is None:
        return None, 0.0
    p = float(np.trace(rho).real)
    if p <= 0:
        return None, 0.0
    return rho / p, p


# --------------------------------------------------------------------------
# sampling and count processing


def setting_seed(seed: int, setting_id: str) -> np.random.SeedSequence:
    """Counter-style seed: the same (seed, setting) pair always yields the same stream."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(zlib.crc32(setting_id.encode()),))


def sample_counts(
    probabilities: Mapping[str, float], shots: int, seed: int, setting_id: str = "0"
) -> list[CountRecord]:
    """Multinomial draw of ``shots`` post-selected events."""
    if shots < 0:
        raise MeasurementError("shots must be non-negative")
    keys = sorted(probabilities)
    p = np.array([max(probabilities[k], 0.0) for k in keys], dtype=float)
    total = p.sum()
    if shots == 0 or total == 0:
        draws = np.zeros(len(keys), dtype=int)
    else:
        rng = np.random.default_rng(setting_seed(seed, setting_id))
        draws = rng.multinomial(shots, p / total)
    return [CountRecord(setting_id, k, int(c), shots, seed) for k, c in zip(keys, draws)]


@dataclass
class SubtractionResult:
    records: list[CountRecord]
    floored_events: int = 0
    floored_outcomes: list = field(default_factory=list)


def _index(records):
    out = {}
    for r in records:
        key = (r.setting_id, r.outcome)
        if key in out:
            raise MeasurementError(f"duplicate count record {key}")
        out[key] = r
    return out


def subtract_single_source_events(total, blocked_a, blocked_b) -> SubtractionResult:
    """Total four-folds minus the four-folds seen with either source blocked.

    Counts are floored at zero; the removed negative mass is reported.
    """
    t, a, b = _index(total), _index(blocked_a), _index(blocked_b)
    if set(a) - set(t) or set(b) - set(t):
        raise MeasurementError("blocked runs contain settings absent from the total run")
    if {k[0] for k in a} != {k[0] for k in t} and a:
        raise MeasurementError("setting mismatch between total and first blocked run")
    if {k[0] for k in b} != {k[0] for k in t} and b:
        raise MeasurementError("setting mismatch between total and second blocked run")
    out, floored, where = [], 0, []
    for key in sorted(t):
        r = t[key]
        diff = r.count - (a[key].count if key in a else 0) - (b[key].count if key in b else 0)
        if diff < 0:
            floored += -diff
            where.append(key)
            diff = 0
        out.append(CountRecord(r.setting_id, r.outcome, diff, r.shots, r.seed))
    return SubtractionResult(out, floored, where)


def subtract_probabilities(total, blocked_a, blocked_b):
    """Exact-mode analogue of the subtraction on probability maps."""
    out, floored = {}, 0.0
    for k, v in total.items():
        d = v - blocked_a.get(k, 0.0) - blocked_b.get(k, 0.0)
        if d < 0:
            floored += -d
            d = 0.0
        out[k] = d
    return out, floored


def normalize_per_input(counts: Mapping[str, Mapping[str, float]]) -> dict[str, dict[str, float]]:
    out = {}
    for inp, row in counts.items():
        total = float(sum(row.values()))
        if total <= 0:
            raise MeasurementError(f"input {inp!r} has no coincidences")
        out[inp] = {k: v / total for k, v in row.items()}
    return out


CSV_COLUMNS = ("setting_id", "outcome", "count", "shots", "seed")


def records_to_csv(records: Sequence[CountRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.setting_id, r.outcome, r.count, r.shots, "" if r.seed is None else r.seed])
    return buf.getvalue()


def records_from_csv(text: str) -> list[CountRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for i, row in enumerate(rows, start=2):
        try:
            out.append(
                CountRecord(
                    row["setting_id"],
                    row["outcome"],
                    int(row["count"]),
                    int(row["shots"] or 0),
                    int(row["seed"]) if row["seed"] else None,
                )
            )
        except (KeyError, ValueError) as exc:
            raise MeasurementError(f"CSV line {i}: {exc}") from None
    return out
