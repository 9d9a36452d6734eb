"""Scenario execution: sources -> circuit -> analyzers -> counts -> metrics.

A scenario is a JSON document::

    {
      "schema_version": 1,
      "name": "my-run",
      "circuit": "cswap-simplified",
      "encoding": "parallel",
      "source": {"epsilon": 0.0, "overlap": 1.0, ...},
      "measurement": {"shots": "exact", "seed": 0, "detector": "threshold",
                      "subtraction": true},
      "analysis": ["truth_table", "coherence"]
    }

Unknown keys are rejected. ``circuit`` is a built-in name or a path to a
circuit file (see :meth:`CircuitSpec.to_json`).
"""

from __future__ import annotations

import copy
import dataclasses
import itertools
import json
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from math import pi, sqrt
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import fock
from .circuits import (
    BUILTIN_CIRCUITS,
    MEASURED_COMPONENTS,
    CircuitSpec,
    build_cswap_simplified,
    build_ppbs_cnot,
    compile_circuit,
)
from .measurement import (
    AnalyzerSetting,
    CoincidencePattern,
    CountRecord,
    analyzer_transfer,
    equator_axis,
    outcome_probabilities,
    records_to_csv,
    sample_counts,
    subtract_probabilities,
    subtract_single_source_events,
    z_axis,
)
from .metrics import (
    CNOT_MAP,
    CNOT_REVERSED_MAP,
    FREDKIN_MAP,
    M_DEFINITIONS,
    Estimate,
    MetricsReport,
    TruthTable,
    clamp_unit,
    coherence_C,
    entanglement_class,
    ghz_fidelity,
    m_correlations,
    process_fidelity_estimate,
    truth_table_fidelity,
)
from .sources import (
    SourceConfig,
    TruncationWarning,
    calibrate_epsilon,
    pair_vector,
    source_state,
    target_poly,
    werner_components,
)

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    pass


_TOP_KEYS = {"schema_version", "name", "circuit", "encoding", "source", "measurement", "analysis", "output"}
_SOURCE_KEYS = {
    "epsilon",
    "contamination",
    "n_max_pairs",
    "overlap",
    "entangled_state_fidelity",
    "components",
    "n_max",
}
_MEAS_KEYS = {"shots", "seed", "detector", "subtraction"}
_ANALYSES = {"truth_table", "coherence", "cnot_truth_tables"}


@dataclass(frozen=True)
class Scenario:
    name: str
    circuit: str = "cswap-simplified"
    encoding: str = "parallel"
    source: SourceConfig = field(default_factory=SourceConfig)
    shots: int | None = None  # None means exact probabilities
    seed: int | None = None
    detector: str = "threshold"
    subtraction: bool = True
    analysis: tuple[str, ...] = ("truth_table", "coherence")
    output: str | None = None
    base_dir: str = "."

    def __post_init__(self):
        if self.shots is not None and self.shots < 0:
            raise ScenarioError("shots must be non-negative or 'exact'")
        if self.shots and self.seed is None:
            raise ScenarioError("a seed is required when sampling")
        if self.detector not in ("threshold", "pnr"):
            raise ScenarioError(f"unknown detector model {self.detector!r}")
        bad = set(self.analysis) - _ANALYSES
        if bad:
            raise ScenarioError(f"unknown analyses {sorted(bad)}")

    def replace(self, **kw) -> "Scenario":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        src = self.source
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "circuit": self.circuit,
            "encoding": self.encoding,
            "source": {
                "epsilon": src.epsilon,
                "contamination": src.contamination,
                "n_max_pairs": src.n_max_pairs,
                "overlap": src.overlap,
                "entangled_state_fidelity": src.entangled_state_fidelity,
                "components": {k: dict(v) for k, v in sorted(src.components.items())},
                "n_max": src.n_max,
            },
            "measurement": {
                "shots": "exact" if self.shots is None else self.shots,
                "seed": self.seed,
                "detector": self.detector,
                "subtraction": self.subtraction,
            },
            "analysis": list(self.analysis),
            "output": self.output,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: Mapping, base_dir: str = ".") -> "Scenario":
        def check(obj, allowed, where):
            if not isinstance(obj, Mapping):
                raise ScenarioError(f"{where}: expected an object")
            extra = set(obj) - allowed
            if extra:
                raise ScenarioError(f"{where}: unknown field(s) {sorted(extra)}")

        check(d, _TOP_KEYS, "scenario")
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ScenarioError(f"scenario.schema_version: expected {SCHEMA_VERSION}, got {d.get('schema_version')!r}")
        if "name" not in d:
            raise ScenarioError("scenario.name: required field missing")
        src = d.get("source", {})
        check(src, _SOURCE_KEYS, "scenario.source")
        meas = d.get("measurement", {})
        check(meas, _MEAS_KEYS, "scenario.measurement")
        shots = meas.get("shots", "exact")
        if shots == "exact" or shots is None:
            shots = None
        elif not isinstance(shots, int) or isinstance(shots, bool):
            raise ScenarioError(f"scenario.measurement.shots: expected integer or 'exact', got {shots!r}")
        try:
            source = SourceConfig(**src)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"scenario.source: {exc}") from None
        try:
            return cls(
                name=str(d["name"]),
                circuit=d.get("circuit", "cswap-simplified"),
                encoding=d.get("encoding", "parallel"),
                source=source,
                shots=shots,
                seed=meas.get("seed"),
                detector=meas.get("detector", "threshold"),
                subtraction=bool(meas.get("subtraction", True)),
                analysis=tuple(d.get("analysis", ("truth_table", "coherence"))),
                output=d.get("output"),
                base_dir=base_dir,
            )
        except ValueError as exc:
            raise ScenarioError(f"scenario: {exc}") from None

    @classmethod
    def from_json(cls, text: str, base_dir: str = ".") -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(data, base_dir)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Scenario":
        p = Path(path)
        if not p.exists():
            raise ScenarioError(f"scenario file {p} does not exist")
        return cls.from_json(p.read_text(), str(p.parent))


LAB_NOISE_SOURCE = SourceConfig(
    contamination=0.10,
    n_max_pairs=3,
    overlap=sqrt(0.862),
    entangled_state_fidelity=0.962,
    components=MEASURED_COMPONENTS,
)

BUILTIN_SCENARIOS = {
    "cswap-ideal-truth-table": Scenario("cswap-ideal-truth-table", analysis=("truth_table",)),
    "cswap-ghz-coherence": Scenario("cswap-ghz-coherence", analysis=("coherence",)),
    "cswap-ideal": Scenario("cswap-ideal"),
    "cswap-paper-noise": Scenario("cswap-paper-noise", source=LAB_NOISE_SOURCE),
    "cnot-ideal": Scenario("cnot-ideal", circuit="ppbs-cnot", analysis=("cnot_truth_tables",)),
    "cnot-distinguishable": Scenario(
        "cnot-distinguishable",
        circuit="ppbs-cnot",
        source=SourceConfig(overlap=sqrt(0.862)),
        analysis=("cnot_truth_tables",),
    ),
}


def get_scenario(name_or_path: str) -> Scenario:
    if name_or_path in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[name_or_path]
    return Scenario.load(name_or_path)


# --------------------------------------------------------------------------
# CSWAP simulation


def _circuit(scenario: Scenario) -> CircuitSpec:
    ref = scenario.circuit
    if ref == "cswap-simplified":
        spec = build_cswap_simplified(scenario.encoding)
    elif ref in BUILTIN_CIRCUITS:
        spec = BUILTIN_CIRCUITS[ref]()
    else:
        path = Path(scenario.base_dir) / ref
        if not path.exists():
            raise ScenarioError(f"circuit {ref!r} is neither built in nor an existing file")
        spec = CircuitSpec.from_json(path.read_text())
    if scenario.source.components:
        spec = spec.override(scenario.source.components)
    return spec


@dataclass
class CswapSimulator:
    """Exact outcome probabilities for the simplified CSWAP under a scenario."""

    scenario: Scenario
    spec: CircuitSpec = None
    epsilon: float = 0.0

    def __post_init__(self):
        sc = self.scenario
        spec = _circuit(sc)
        if spec.n_qubits != 3 or "C2out" not in spec.outputs:
            raise ScenarioError("CSWAP analyses need a three-qubit circuit with a C2out herald")
        internal = (0,) if sc.source.overlap >= 1.0 else (0, 1)
        self.spec = spec.with_internal(internal)
        self.truncation_loss = 0.0
        self._cache: dict = {}
        self.transfer = compile_circuit(self.spec).transfer
        out = self.spec.outputs
        self.pattern = CoincidencePattern({out[r]: 1 for r in ("C1out", "T1out", "T2out", "C2out")})
        self.epsilon = sc.source.epsilon
        self.n_pairs = sc.source.n_max_pairs if self.epsilon or sc.source.contamination else 1
        if sc.source.contamination:
            self.epsilon = self._calibrate(sc.source.contamination)

    # analyzers on (C1out, T1out, T2out) plus the C2out projection
    def settings(self, axes: Sequence[float] | None) -> list[AnalyzerSetting]:
        out = self.spec.outputs
        ports = [out["C1out"], out["T1out"], out["T2out"]]
        if axes is None:
            sets = [z_axis(p) for p in ports]
        else:
            sets = [equator_axis(p, a) for p, a in zip(ports, axes)]
        return sets + [equator_axis(out["C2out"], 0.0, project=0)]

    def _inputs(self, control, t1, t2, epsilon, n_pairs, blocked=None):
        sc = self.scenario
        psi = pair_vector(self.spec, control)
        targets = target_poly(self.spec, t1, t2)
        comps = werner_components(sc.source.entangled_state_fidelity, psi)
        out = []
        for w, vec in comps:
            st = source_state(self.spec, vec, targets, epsilon, n_pairs, sc.source.overlap, blocked)
            out.append((w, st))
        return out

    def _accumulate(self, control, t1, t2, axes=None, epsilon=None, sectors=None):
        """Werner-averaged outcome probabilities of the total and blocked runs.

        Sectors with different (nE, nS) are added in probability. A blocked
        run keeps the sectors of the open source and drops the normalization
        of the blocked one.
        """
        eps = self.epsilon if epsilon is None else epsilon
        sets = self.settings(axes)
        u = self.transfer.then(analyzer_transfer(self.transfer.registry, sets))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            inputs = self._inputs(control, t1, t2, eps, self.n_pairs)
        total: dict = {}
        only_e: dict = {}
        only_s: dict = {}
        for w, src in inputs:
            if epsilon is None:
                self.truncation_loss = max(self.truncation_loss, src.truncation_loss)
            for key, st in sorted(src.sectors.items()):
                if sectors is not None and key not in sectors:
                    continue
                if 2 * sum(key) < self.pattern.total:
                    continue
                out = fock.evolve(st, u, self.spec.n_max)
                pr = outcome_probabilities(out, self.pattern, sets, self.scenario.detector, analyzed=True)
                for k, v in pr.items():
                    total[k] = total.get(k, 0.0) + w * v
                    if key[1] == 0:
                        only_e[k] = only_e.get(k, 0.0) + w * v * src.norm_s
                    if key[0] == 0:
                        only_s[k] = only_s.get(k, 0.0) + w * v * src.norm_e
        labels = [format(i, "03b") for i in range(8)]
        fill = lambda d: {k: d.get(k, 0.0) for k in labels}  # noqa: E731
        return fill(total), fill(only_e), fill(only_s)

    def probabilities(self, control, t1, t2, axes=None, epsilon=None, sectors=None):
        """Absolute outcome probabilities for one input and analyzer setting."""
        return self._accumulate(control, t1, t2, axes, epsilon, sectors)[0]

    def _calibrate(self, contamination: float) -> float:
        # contamination is measured on the events that survive subtraction:
        # three-pair sectors with both sources firing against the (1, 1) signal
        if self.n_pairs < 3:
            raise ScenarioError("contamination calibration needs n_max_pairs >= 3")
        p4 = p6 = 0.0
        for bits in itertools.product((0, 1), repeat=3):
            c, t1, t2 = (_basis(b) for b in bits)
            p4 += sum(self.probabilities(c, t1, t2, epsilon=1.0, sectors={(1, 1)}).values())
            p6 += sum(self.probabilities(c, t1, t2, epsilon=1.0, sectors={(2, 1), (1, 2)}).values())
        return calibrate_epsilon(contamination, p4, p6)

    def runs(self, control, t1, t2, axes=None) -> dict:
        """Probability maps of the total run and the two blocked-source runs."""
        key = (tuple(np.round(np.ravel([control, t1, t2]), 15)), None if axes is None else tuple(axes))
        if key in self._cache:
            return self._cache[key]
        total, only_e, only_s = self._accumulate(control, t1, t2, axes)
        out = {"total": total}
        if self.epsilon > 0:
            out["blocked_S"] = only_e
            out["blocked_E"] = only_s
        self._cache[key] = out
        return out


def _basis(bit: int):
    return np.array([0.0, 1.0]) if bit else np.array([1.0, 0.0])


GHZ_INPUT = (np.array([1, 1]) / sqrt(2), _basis(1), _basis(0))


def _process(runs: Mapping[str, dict], scenario: Scenario, setting_id: str, records: list):
    """Turn one setting's runs into post-processed outcome weights.

    Returns (weights, n_events) where n_events is None in exact mode.
    """
    subtract = scenario.subtraction and "blocked_S" in runs
    if scenario.shots is None:
        tot = runs["total"]
        for k in sorted(tot):
            records.append((setting_id, k, tot[k]))
        if subtract:
            tot, _ = subtract_probabilities(tot, runs["blocked_S"], runs["blocked_E"])
        return tot, None
    p_tot = sum(runs["total"].values())
    recs = {}
    for run in ("total", "blocked_S", "blocked_E"):
        if run not in runs:
            continue
        probs = runs[run]
        n = scenario.shots if run == "total" else int(round(scenario.shots * sum(probs.values()) / p_tot))
        recs[run] = sample_counts(probs, n, scenario.seed, f"{setting_id}/{run}")
        records.extend(recs[run])
    if subtract:
        # runs differ only by suffix; subtraction pairs records per setting and outcome
        plain = {k: [dataclasses.replace(r, setting_id=setting_id) for r in v] for k, v in recs.items()}
        res = subtract_single_source_events(plain["total"], plain["blocked_S"], plain["blocked_E"])
        final = res.records
    else:
        final = recs["total"]
    counts = {r.outcome: float(r.count) for r in final}
    return counts, sum(counts.values())


def run_cswap(scenario: Scenario, sim: CswapSimulator | None = None) -> tuple[MetricsReport, list]:
    sim = sim or CswapSimulator(scenario)
    records: list = []
    report = MetricsReport(provenance="subtracted" if scenario.subtraction and sim.epsilon > 0 else "raw")
    report.extra["epsilon"] = sim.epsilon
    report.extra["detector"] = scenario.detector
    report.extra["shots"] = "exact" if scenario.shots is None else scenario.shots

    if "truth_table" in scenario.analysis:
        rows, sigmas, succ = [], [], {}
        for bits in itertools.product((0, 1), repeat=3):
            label = "".join(map(str, bits))
            runs = sim.runs(*(_basis(b) for b in bits))
            succ[label] = sum(runs["total"].values())
            w, n = _process(runs, scenario, f"zzz/{label}", records)
            v = np.array([w.get(format(i, "03b"), 0.0) for i in range(8)])
            tot = v.sum()
            if tot <= 0:
                raise ScenarioError(f"input {label} produced no coincidences")
            p = v / tot
            rows.append(p)
            sigmas.append(np.zeros(8) if n is None else np.sqrt(p * (1 - p) / max(n, 1)))
        tt = TruthTable(np.array(rows), np.array(sigmas))
        report.truth_table = tt.probabilities
        report.success_probability = succ
        report.f_zzz = clamp_unit(truth_table_fidelity(tt, FREDKIN_MAP), report.clamp_events, "F_zzz")

    if "coherence" in scenario.analysis:
        data = {}
        axes_of = {"Z": None, **{k: v[2] for k, v in M_DEFINITIONS.items()}}
        for key, axes in axes_of.items():
            runs = sim.runs(*GHZ_INPUT, axes=axes)
            w, _ = _process(runs, scenario, f"ghz/{key}", records)
            data[key] = w
        corr = m_correlations(data, counts=scenario.shots is not None)
        report.m = corr
        report.c = coherence_C(corr)
        report.verdict = entanglement_class(report.c.value)
        report.f_ghz = clamp_unit(ghz_fidelity(corr.m0, report.c), report.clamp_events, "F_GHZ")
        if report.f_zzz is not None:
            report.f_process = clamp_unit(
                process_fidelity_estimate(report.f_zzz, report.c), report.clamp_events, "F_process"
            )
    report.extra["truncation_loss"] = sim.truncation_loss
    if sim.truncation_loss > 1e-6:
        warnings.warn(
            f"pair truncation at {sim.n_pairs} drops relative norm {sim.truncation_loss:.2e}",
            TruncationWarning,
            stacklevel=2,
        )
    return report, records


# --------------------------------------------------------------------------
# CNOT truth tables


def cnot_truth_table(basis: str, overlap: float = 1.0, components=None, detector: str = "pnr"):
    """Truth table of the PPBS CNOT with the target photon from the other source.

    Returns (TruthTable, fidelity, success probability per input).
    """
    spec = build_ppbs_cnot(basis)
    if components:
        spec = spec.override(components)
    internal = (0,) if overlap >= 1.0 else (0, 1)
    spec = spec.with_internal(internal)
    u = compile_circuit(spec).transfer
    reg = spec.registry
    out_c, out_t = spec.outputs["Cout"], spec.outputs["Tout"]
    qc, qt = spec.logical_inputs
    oc, ot = spec.logical_outputs
    labels = [(0, overlap)] if overlap >= 1.0 else [(0, overlap), (1, sqrt(1 - overlap**2))]
    rows, succ = [], []
    for c, t in itertools.product((0, 1), repeat=2):
        pc = [(a, [(spec.inputs[m[0]], m[1], 0) for m in ms]) for a, ms in qc.state(c)]
        pt = [
            (a * la, [(spec.inputs[m[0]], m[1], k) for m in ms])
            for a, ms in qt.state(t)
            for k, la in labels
        ]
        st = fock.product_of_factors(reg, [pc, pt])
        out = fock.evolve(st, u)
        row = np.zeros(4)
        for j, (bc, bt) in enumerate(itertools.product((0, 1), repeat=2)):
            for kc, kt in itertools.product(internal, repeat=2):
                vc = oc.one if bc else oc.zero
                vt = ot.one if bt else ot.zero
                proj = fock.product_of_factors(
                    reg,
                    [
                        [(x, [(out_c, pol, kc)]) for x, pol in zip(vc, "HV") if x != 0],
                        [(x, [(out_t, pol, kt)]) for x, pol in zip(vt, "HV") if x != 0],
                    ],
                )
                row[j] += abs(fock.inner_product(proj, out)) ** 2
        succ.append(row.sum())
        rows.append(row / row.sum())
    tt = TruthTable(np.array(rows))
    ideal = CNOT_MAP if spec.ideal == "cnot" else CNOT_REVERSED_MAP
    return tt, truth_table_fidelity(tt, ideal), succ


def run_cnot(scenario: Scenario) -> tuple[MetricsReport, list]:
    report = MetricsReport(provenance="raw")
    records = []
    for basis in ("computational", "complementary"):
        tt, fid, succ = cnot_truth_table(basis, scenario.source.overlap, scenario.source.components or None)
        report.extra[f"F_{basis}"] = {"value": fid.value, "sigma": fid.sigma}
        report.extra[f"success_{basis}"] = [float(s) for s in succ]
        report.extra[f"truth_table_{basis}"] = tt.probabilities.tolist()
        for i, row in enumerate(tt.probabilities):
            for j, p in enumerate(row):
                records.append((f"cnot-{basis}/{i:02b}", f"{j:02b}", float(p)))
    return report, records


# --------------------------------------------------------------------------
# entry points


@dataclass
class RunResult:
    report: MetricsReport
    records: list
    files: dict = field(default_factory=dict)


def run(scenario: Scenario, out_dir: str | None = None) -> RunResult:
    """Execute a scenario and optionally write report.json, report.txt and a CSV."""
    if "cnot_truth_tables" in scenario.analysis:
        report, records = run_cnot(scenario)
    else:
        report, records = run_cswap(scenario)
    report.extra["scenario"] = scenario.name
    result = RunResult(report, records)
    out_dir = out_dir or scenario.output
    if out_dir:
        result.files = write_outputs(result, scenario, out_dir)
    return result


def records_csv(records: list, exact: bool) -> str:
    if not exact:
        return records_to_csv([r for r in records if isinstance(r, CountRecord)])
    lines = ["setting_id,outcome,probability"]
    for sid, outcome, p in records:
        lines.append(f"{sid},{outcome},{p:.15e}")
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_outputs(result: RunResult, scenario: Scenario, out_dir: str) -> dict:
    d = Path(out_dir)
    exact = scenario.shots is None or "cnot_truth_tables" in scenario.analysis
    files = {
        "report.json": result.report.to_json(),
        "report.txt": result.report.to_text(),
        ("probabilities.csv" if exact else "counts.csv"): records_csv(result.records, exact),
    }
    for name, text in files.items():
        _atomic_write(d / name, text)
    return {k: str(d / k) for k in files}


SWEEP_PARAMS = ("epsilon", "contamination", "overlap", "entangled_state_fidelity", "shots")


def _apply_param(scenario: Scenario, param: str, value) -> Scenario:
    src = scenario.source
    if param == "shots":
        return scenario.replace(shots=None if value == "exact" else int(value))
    if param.startswith("components."):
        _, label, key = param.split(".", 2)
        comps = copy.deepcopy({k: dict(v) for k, v in src.components.items()})
        comps.setdefault(label, {})[key] = float(value)
        return scenario.replace(source=_replace_source(src, components=comps))
    if param not in SWEEP_PARAMS:
        raise ScenarioError(f"unknown sweep parameter {param!r}")
    kw: dict[str, Any] = {param: float(value)}
    if param == "epsilon":
        kw["contamination"] = None
        if src.n_max_pairs < 2 and float(value) > 0:
            kw["n_max_pairs"] = 3
    return scenario.replace(source=_replace_source(src, **kw))


def _replace_source(src: SourceConfig, **kw) -> SourceConfig:
    return dataclasses.replace(src, **kw)


def _sweep_point(args):
    scenario, param, value = args
    res = run(_apply_param(scenario, param, value))
    d = res.report.to_dict()

    def val(key):
        return None if d.get(key) is None else d[key]["value"]

    def sig(key):
        return None if d.get(key) is None else d[key]["sigma"]

    return {
        "parameter": param,
        "value": value,
        "F_zzz": val("F_zzz"),
        "F_zzz_sigma": sig("F_zzz"),
        "C": val("C"),
        "C_sigma": sig("C"),
        "F_GHZ": val("F_GHZ"),
        "F_process": val("F_process"),
        "epsilon": res.report.extra.get("epsilon"),
    }


def sweep(scenario: Scenario, param: str, values: Sequence, jobs: int = 1) -> list[dict]:
    """One report row per parameter value; rows come back in input order."""
    if not (param in SWEEP_PARAMS or param.startswith("components.")):
        raise ScenarioError(f"unknown sweep parameter {param!r}")
    tasks = [(scenario, param, v) for v in values]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def sweep_csv(rows: list[dict]) -> str:
    cols = ["parameter", "value", "epsilon", "F_zzz", "F_zzz_sigma", "C", "C_sigma", "F_GHZ", "F_process"]
    lines = [",".join(cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r.get(c)
            cells.append("" if v is None else (f"{v:.12g}" if isinstance(v, float) else str(v)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# circuit validation


@dataclass
class ValidationRow:
    name: str
    ideal: str | None
    success_probability: float
    distance: float | None
    uniform: bool
    passed: bool | None  # None marks an informational row

    def line(self) -> str:
        d = "n/a" if self.distance is None else f"{self.distance:.3e}"
        status = "INFO" if self.passed is None else ("PASS" if self.passed else "FAIL")
        return f"{status} {self.name:<20} ideal={self.ideal or '-':<14} p={self.success_probability:.6f} distance={d}"


def validate_circuit(spec: CircuitSpec, tol: float = 1e-9) -> ValidationRow:
    """Extract the post-selected operator and compare it with the circuit's ideal."""
    from .circuits import extract_logical_operator

    res = extract_logical_operator(spec)
    ok = res.uniform and not res.rank_deficient and (res.distance is None or res.distance < tol)
    return ValidationRow(spec.name, spec.ideal, res.success_probability, res.distance, res.uniform, ok)


def validate_builtins(tol: float = 1e-9) -> list[ValidationRow]:
    rows = [validate_circuit(build(), tol) for _, build in sorted(BUILTIN_CIRCUITS.items())]
    rows.append(validate_circuit(build_ppbs_cnot("complementary"), tol))
    return rows


def perturbation_report(components: Mapping | None = None) -> ValidationRow:
    """Operator distance of the simplified CSWAP with measured component values.

    Informational: the perturbed gate is expected to miss the ideal.
    """
    from .circuits import extract_logical_operator

    spec = build_cswap_simplified().override(components or MEASURED_COMPONENTS)
    res = extract_logical_operator(spec, ideal="fredkin")
    return ValidationRow(spec.name + "+measured", "fredkin", res.success_probability, res.distance, res.uniform, None)
