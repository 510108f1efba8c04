import json

import pytest

from bandtile.cli import main


def run_to(tmp_path, name, args):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out.read_bytes()


def test_sampling_suite_passes_and_repeats(tmp_path):
    code, first = run_to(tmp_path, "a.json", ["sampling", "--seed", "4"])
    assert code == 0
    code2, second = run_to(tmp_path, "b.json", ["sampling", "--seed", "4"])
    assert code2 == 0
    assert first == second


def test_report_shape_and_provenance(tmp_path):
    code, payload = run_to(tmp_path, "r.json",
                           ["interp", "oracle-sinc", "--seed", "9"])
    assert code == 0
    doc = json.loads(payload)
    assert doc["passed"] is True
    prov = doc["provenance"]
    assert prov["seed"] == 9
    assert prov["suite"] == "interp oracle-sinc"
    assert doc["report"]["max_error"] < 1e-6


@pytest.mark.parametrize("args", [
    ["interp", "eval", "--seed", "5"],
    ["tiling", "demo", "--seed", "2"],
    ["weights", "run", "--seed", "3"],
    ["simplicial", "check", "--seed", "7"],
    ["simplicial", "perturb", "--seed", "7"],
    ["codec", "rotation", "--seed", "2"],
    ["codec", "toy", "--seed", "6", "--trials", "40"],
])
def test_suites_green_and_deterministic(tmp_path, args):
    code, first = run_to(tmp_path, "a.out", args)
    assert code == 0, args
    _, second = run_to(tmp_path, "b.out", args)
    assert first == second


def test_csv_format(tmp_path):
    code, payload = run_to(tmp_path, "t.csv",
                           ["tiling", "demo", "--seed", "5",
                            "--format", "csv"])
    assert code == 0
    head = payload.decode().splitlines()[0]
    assert head.startswith("marker,") and "height" in head


def test_malformed_params_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "params.json"
    bad.write_text("not json")
    code = main(["weights", "run", "--params", str(bad)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_missing_params_key_exits_2(tmp_path, capsys):
    bad = tmp_path / "params.json"
    bad.write_text('{"cost_ratio": 1.0}')
    code = main(["weights", "run", "--params", str(bad)])
    assert code == 2


def test_unknown_subcommand_exits_2():
    assert main(["no-such-suite"]) == 2


def test_failing_suite_writes_witness(tmp_path, monkeypatch):
    # an impossible tolerance forces a failure report
    monkeypatch.chdir(tmp_path)
    code = main(["interp", "oracle-sinc", "--seed", "9",
                 "--tol", "oracle=1e-30"])
    assert code == 1
    witness = tmp_path / "bandtile-interp-witness.json"
    assert witness.exists()
    doc = json.loads(witness.read_text())
    assert doc["passed"] is False


def test_tolerance_override_recorded(tmp_path):
    code, payload = run_to(tmp_path, "r.json",
                           ["interp", "oracle-sinc", "--seed", "9",
                            "--tol", "oracle=1e-3"])
    assert code == 0
    doc = json.loads(payload)
    assert doc["provenance"]["tolerances"] == {"oracle": 1e-3}
