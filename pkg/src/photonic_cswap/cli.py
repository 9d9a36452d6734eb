"""Command line interface.

    python3 -m photonic_cswap run --scenario cswap-paper-noise --out results/
    python3 -m photonic_cswap sweep --scenario cswap-paper-noise --param overlap --values 0.9,0.95,1
    python3 -m photonic_cswap validate
    python3 -m photonic_cswap tomography --fidelity 0.962 --shots 100000 --seed 1
    python3 -m photonic_cswap list

Exit status is 0 on success, 1 when a validation fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuits import BUILTIN_CIRCUITS, CircuitError, CircuitSpec
from .measurement import MeasurementError
from .metrics import MetricsError, concurrence, state_fidelity
from .runner import (
    BUILTIN_SCENARIOS,
    ScenarioError,
    _atomic_write,
    get_scenario,
    perturbation_report,
    records_csv,
    run,
    sweep,
    sweep_csv,
    validate_builtins,
    validate_circuit,
)
from .sources import PHI_PLUS, SourceError, imperfect_entangled_pair
from .tomography import (
    TomographyError,
    project_psd,
    reconstruct_linear,
    reconstruct_ml,
    simulate_tomography,
)

USER_ERRORS = (ScenarioError, CircuitError, SourceError, MeasurementError, MetricsError, TomographyError)


def _shots(text: str):
    if text == "exact":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'exact', got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("shots must be non-negative")
    return n


def _apply_overrides(scenario, args):
    kw = {}
    if args.shots is not None:
        kw["shots"] = None if args.shots == "exact" else args.shots
    if args.seed is not None:
        kw["seed"] = args.seed
    if getattr(args, "no_subtraction", False):
        kw["subtraction"] = False
    if getattr(args, "detector", None):
        kw["detector"] = args.detector
    if kw.get("shots") and scenario.seed is None and "seed" not in kw:
        kw["seed"] = 0
    return scenario.replace(**kw) if kw else scenario


def _add_common(p):
    p.add_argument("--scenario", required=True, help="built-in scenario name or path to a scenario JSON file")
    p.add_argument("--seed", type=int, help="master seed for sampling")
    p.add_argument("--shots", type=lambda s: s if s == "exact" else _shots(s), help="events per setting or 'exact'")
    p.add_argument("--out", help="output directory")
    p.add_argument("--detector", choices=("threshold", "pnr"))
    p.add_argument("--no-subtraction", action="store_true", help="skip single-source event subtraction")


def cmd_run(args) -> int:
    sc = _apply_overrides(get_scenario(args.scenario), args)
    res = run(sc, args.out)
    if args.format == "json":
        sys.stdout.write(res.report.to_json())
    elif args.format == "csv":
        exact = sc.shots is None or "cnot_truth_tables" in sc.analysis
        sys.stdout.write(records_csv(res.records, exact))
    else:
        sys.stdout.write(res.report.to_text())
    return 0


def cmd_sweep(args) -> int:
    sc = _apply_overrides(get_scenario(args.scenario), args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ScenarioError("--values needs at least one entry")
    if args.param != "shots":
        try:
            values = [float(v) for v in values]
        except ValueError:
            raise ScenarioError(f"non-numeric value in --values {args.values!r}") from None
    rows = sweep(sc, args.param, values, jobs=args.jobs)
    text = sweep_csv(rows) if args.format != "json" else json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if args.out:
        name = "sweep.json" if args.format == "json" else "sweep.csv"
        _atomic_write(Path(args.out) / name, text)
    sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    if args.circuit:
        path = Path(args.circuit)
        if not path.exists():
            raise CircuitError(f"circuit file {path} does not exist")
        rows = [validate_circuit(CircuitSpec.from_json(path.read_text()))]
    else:
        rows = validate_builtins()
        rows.append(perturbation_report())
    for r in rows:
        print(r.line())
    return 0 if all(r.passed is not False for r in rows) else 1


def cmd_list(args) -> int:
    print("scenarios:")
    for name in sorted(BUILTIN_SCENARIOS):
        print(f"  {name}")
    print("circuits:")
    for name in sorted(BUILTIN_CIRCUITS):
        print(f"  {name}")
    return 0


def cmd_tomography(args) -> int:
    rho = imperfect_entangled_pair(args.fidelity)
    shots = None if args.shots == "exact" else args.shots
    data = simulate_tomography(rho, shots, args.seed)
    lin = reconstruct_linear(data)
    est = project_psd(lin) if args.estimator == "linear" else reconstruct_ml(data)
    report = {
        "fidelity_model": args.fidelity,
        "fidelity_reconstructed": state_fidelity(est, PHI_PLUS),
        "concurrence_model": concurrence(rho),
        "concurrence_reconstructed": concurrence(est),
        "estimator": args.estimator,
        "shots": "exact" if shots is None else shots,
        "seed": args.seed,
    }
    text = json.dumps({k: (round(v, 12) if isinstance(v, float) else v) for k, v in report.items()}, indent=2, sort_keys=True) + "\n"
    if args.out:
        _atomic_write(Path(args.out) / "tomography.json", text)
        _atomic_write(Path(args.out) / "tomography_counts.csv", data.to_csv() if shots is not None else "")
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="photonic-cswap", description="Linear-optics CSWAP gate simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario")
    _add_common(p)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a scenario over a list of parameter values")
    _add_common(p)
    p.add_argument("--param", required=True, help="epsilon, contamination, overlap, entangled_state_fidelity, shots or components.LABEL.KEY")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check built-in circuits against their ideal gates")
    p.add_argument("--circuit", help="validate a circuit JSON file instead")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("list", help="list built-in scenarios and circuits")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("tomography", help="simulate tomography of the entangled control pair")
    p.add_argument("--fidelity", type=float, default=0.962)
    p.add_argument("--shots", type=lambda s: s if s == "exact" else _shots(s), default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimator", choices=("linear", "ml"), default="linear")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tomography)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
