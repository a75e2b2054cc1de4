import json

import pytest

from qsdplab.cli import main
from qsdplab.instance import random_instance, save_instance


@pytest.fixture
def instance_file(tmp_path, rng):
    inst = random_instance(rng, n=3, m=2)
    path = tmp_path / "inst.json"
    save_instance(inst, str(path))
    return str(path)


def test_solve_roundtrip(instance_file, tmp_path, capsys):
    out = tmp_path / "result.json"
    code = main(["solve", instance_file, "--epsilon", "0.2", "--seed", "1",
                 "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["dual_pass"] and payload["primal_pass"]
    assert "opt_estimate" in payload
    assert payload["ledger_audit"]


def test_solve_primal_framework(instance_file, tmp_path):
    out = tmp_path / "res.json"
    code = main(["solve", instance_file, "--framework", "primal",
                 "--epsilon", "0.2", "--guess", "-0.5", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["verdict"] == "feasible"


def test_solve_primal_trace_csv(instance_file, tmp_path):
    out = tmp_path / "res.json"
    csv_path = tmp_path / "trace.csv"
    code = main(["solve", instance_file, "--framework", "primal",
                 "--epsilon", "0.25", "--guess", "-0.5",
                 "--trace-csv", str(csv_path), "--out", str(out)])
    assert code == 0


def test_solve_requires_guess_for_primal(instance_file):
    assert main(["solve", instance_file, "--framework", "primal"]) == 3


def test_invalid_instance_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"n\": 2}")
    assert main(["solve", str(bad)]) == 3


def test_gibbs_subcommand(instance_file, tmp_path):
    out = tmp_path / "g.json"
    code = main(["gibbs", instance_file, "--y", "[0.0, 0.5, 0.0]",
                 "--model", "operator", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["trace_distance_to_exact"] <= 1e-3


def test_gibbs_rejects_bad_weights(instance_file):
    assert main(["gibbs", instance_file, "--y", "[1.0]"]) == 3
    assert main(["gibbs", instance_file, "--y", "[-1, 0, 0]"]) == 3


def test_trace_est_subcommand(instance_file, tmp_path):
    out = tmp_path / "t.json"
    code = main(["trace-est", instance_file, "--y", "[0.0, 0.3, 0.0]",
                 "--j", "1", "--k", "100000", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["error"] <= 0.2


def test_ledger_subcommand(capsys):
    assert main(["ledger"]) == 0
    text = capsys.readouterr().out
    payload = json.loads(text)
    assert "gibbs_operator" in payload["formulas"]


def test_app_lowerbound(tmp_path):
    out = tmp_path / "lb.json"
    code = main(["app", "lowerbound", "--m", "4", "--case", "a",
                 "--epsilon", "0.1", "--inst-eps", "0.25", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert abs(payload["opt_estimate"] - 2.0) <= 0.1
