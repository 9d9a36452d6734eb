import json
from math import sqrt

import pytest

from photonic_cswap import cli
from photonic_cswap.circuits import build_cswap_simplified
from photonic_cswap.runner import (
    BUILTIN_SCENARIOS,
    Scenario,
    ScenarioError,
    cnot_truth_table,
    run,
    sweep,
    sweep_csv,
    validate_builtins,
)
from photonic_cswap.sources import SourceConfig

MINIMAL = {"schema_version": 1, "name": "t"}


def test_scenario_json_roundtrip():
    sc = BUILTIN_SCENARIOS["cswap-paper-noise"]
    again = Scenario.from_json(sc.to_json())
    assert again.to_json() == sc.to_json()


@pytest.mark.parametrize(
    "doc,match",
    [
        ({**MINIMAL, "colour": 1}, "colour"),
        ({**MINIMAL, "source": {"eps": 0.1}}, "eps"),
        ({**MINIMAL, "measurement": {"shot": 5}}, "shot"),
        ({"schema_version": 2, "name": "t"}, "schema_version"),
        ({"schema_version": 1}, "name"),
        ({**MINIMAL, "measurement": {"shots": "lots"}}, "shots"),
        ({**MINIMAL, "measurement": {"shots": 10}}, "seed"),
        ({**MINIMAL, "source": {"overlap": 2.0}}, "source"),
        ({**MINIMAL, "analysis": ["vibes"]}, "analyses"),
    ],
)
def test_scenario_validation(doc, match):
    with pytest.raises(ScenarioError, match=match):
        Scenario.from_dict(doc)


def test_scenario_parse_error_has_position():
    with pytest.raises(ScenarioError, match="line 2, column"):
        Scenario.from_json('{"schema_version": 1,\n "name": }')


def test_circuit_file_reference(tmp_path):
    (tmp_path / "gate.json").write_text(build_cswap_simplified().to_json())
    doc = {**MINIMAL, "circuit": "gate.json", "analysis": ["truth_table"]}
    (tmp_path / "sc.json").write_text(json.dumps(doc))
    res = run(Scenario.load(tmp_path / "sc.json"))
    assert res.report.f_zzz.value == pytest.approx(1.0)


def test_missing_circuit_file_is_reported(tmp_path):
    sc = Scenario.from_dict({**MINIMAL, "circuit": "missing.json"}, str(tmp_path))
    with pytest.raises(ScenarioError, match="missing.json"):
        run(sc)


def test_ideal_scenario_is_perfect():
    rep = run(BUILTIN_SCENARIOS["cswap-ideal"]).report
    assert rep.f_zzz.value == pytest.approx(1.0, abs=1e-12)
    assert rep.c.value == pytest.approx(1.0, abs=1e-12)
    assert rep.f_process.value == pytest.approx(1.0, abs=1e-12)
    assert rep.f_zzz.sigma == 0
    assert all(p == pytest.approx(1 / 162) for p in rep.success_probability.values())


def test_sampled_run_has_errors_and_is_reproducible(tmp_path):
    sc = BUILTIN_SCENARIOS["cswap-ideal"].replace(
        shots=500, seed=11, source=SourceConfig(overlap=sqrt(0.862))
    )
    a = run(sc, str(tmp_path / "a"))
    b = run(sc, str(tmp_path / "b"))
    for name in ("report.json", "report.txt", "counts.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert a.report.f_zzz.sigma > 0
    assert a.report.c.sigma > 0
    c = run(sc.replace(seed=12)).report
    assert c.to_json() != a.report.to_json()


def test_multipair_subtraction_helps():
    src = SourceConfig(epsilon=0.1, n_max_pairs=3)
    sc = Scenario("mp", source=src, analysis=("truth_table",))
    with_sub = run(sc).report.f_zzz.value
    without = run(sc.replace(subtraction=False)).report.f_zzz.value
    assert without < with_sub <= 1.0


def test_sweep_is_order_stable_across_jobs():
    sc = Scenario("sw", analysis=("truth_table",))
    values = [0.8, 0.9, 1.0]
    serial = sweep_csv(sweep(sc, "overlap", values, jobs=1))
    parallel = sweep_csv(sweep(sc, "overlap", values, jobs=2))
    assert serial == parallel
    assert serial.count("\n") == 4


def test_sweep_rejects_unknown_parameter():
    with pytest.raises(ScenarioError):
        sweep(Scenario("x"), "temperature", [1.0])


def test_component_sweep_degrades_coherence():
    # an unbalanced PPBS skews the superposition but keeps the classical truth table
    rows = sweep(Scenario("x"), "components.PPBS-A1.R_H", [1 / 3, 0.45])
    assert rows[0]["C"] == pytest.approx(1.0)
    assert rows[1]["C"] < 0.95
    assert rows[1]["F_zzz"] == pytest.approx(1.0)


def test_cnot_truth_tables():
    for basis in ("computational", "complementary"):
        tt, f, succ = cnot_truth_table(basis)
        assert f.value == pytest.approx(1.0)
        assert all(s == pytest.approx(1 / 9) for s in succ)


def test_builtin_circuits_validate():
    assert all(r.passed for r in validate_builtins())


# --------------------------------------------------------------------------
# CLI


def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    for name in BUILTIN_SCENARIOS:
        assert name in out


def test_cli_run_json_and_files(tmp_path, capsys):
    rc = cli.main(["run", "--scenario", "cswap-ideal-truth-table", "--format", "json", "--out", str(tmp_path)])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["F_zzz"]["value"] == 1.0
    assert (tmp_path / "probabilities.csv").exists()
    assert not list(tmp_path.glob(".*"))  # no temp files left behind


def test_cli_run_csv_with_shots(capsys):
    rc = cli.main(["run", "--scenario", "cswap-ideal-truth-table", "--shots", "100", "--seed", "3", "--format", "csv"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("setting_id,outcome,count,shots,seed")


def test_cli_bad_scenario_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "name": "x", "typo": 3}')
    assert cli.main(["run", "--scenario", str(bad)]) == 2
    assert "typo" in capsys.readouterr().err


def test_cli_validate_corrupted_circuit(tmp_path, capsys):
    bad = tmp_path / "c.json"
    bad.write_text(build_cswap_simplified().to_json()[:-30])
    assert cli.main(["validate", "--circuit", str(bad)]) == 2
    assert "line" in capsys.readouterr().err


def test_cli_validate_builtins(capsys):
    assert cli.main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "INFO" in out


def test_cli_tomography(capsys):
    assert cli.main(["tomography", "--shots", "20000", "--seed", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["fidelity_reconstructed"] == pytest.approx(0.962, abs=0.02)


def test_cli_bad_shots_is_a_usage_error():
    with pytest.raises(SystemExit):
        cli.main(["run", "--scenario", "cswap-ideal", "--shots", "-3"])
