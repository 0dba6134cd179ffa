import csv
import io
import json
import math
import subprocess
import sys

import pytest

from haarlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_volume_json(capsys):
    code, doc = run_json(capsys, "volume", "--group", "so:3")
    assert code == 0
    assert doc["schema_version"] == 1
    assert doc["passed"] is True
    assert doc["data"]["closed_form"] == pytest.approx(2 ** 4.5 * math.pi ** 2, rel=1e-14)
    assert doc["data"]["quadrature"] == pytest.approx(223.3237, abs=1e-4)


def test_volume_su2(capsys):
    code, doc = run_json(capsys, "volume", "--group", "su:2")
    assert code == 0
    assert doc["data"]["closed_form"] == pytest.approx(55.8309, abs=1e-4)


def test_impossible_tolerance_fails(capsys):
    code, out, _ = run(capsys, "volume", "--group", "so:3", "--tol", "1e-30")
    assert code == 1
    assert "[FAIL]" in out


def test_sample_is_deterministic(capsys):
    _, first = run_json(capsys, "sample", "--group", "su:2", "--samples", "3", "--seed", "4")
    _, second = run_json(capsys, "sample", "--group", "su:2", "--samples", "3", "--seed", "4")
    _, other = run_json(capsys, "sample", "--group", "su:2", "--samples", "3", "--seed", "5")
    assert first == second
    assert first["data"] != other["data"]


def test_orthogonality(capsys):
    code, doc = run_json(capsys, "orthogonality", "--group", "su:2")
    assert code == 0
    assert doc["data"]["dims"] == [1, 2, 3]
    assert doc["data"]["gram_max_deviation"] < 1e-6


def test_weyl_check(capsys):
    code, doc = run_json(capsys, "weyl-check", "--group", "so:4", "--functions", "1,tr2")
    assert code == 0
    assert doc["data"]["weyl_order"] == 4
    assert [row["f"] for row in doc["table"]] == ["1", "tr2"]


def test_weyl_check_rejects_su(capsys):
    code, _, err = run(capsys, "weyl-check", "--group", "su:2")
    assert code == 2
    assert err.startswith("haarlab: error:")


def test_chartable_csv(capsys):
    code, out, _ = run(capsys, "chartable", "--group", "S3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["degree"] for r in rows] == ["1", "1", "2"]
    assert rows[2]["class1"] == "-1"


def test_chartable_text_has_irrationals(capsys):
    code, out, _ = run(capsys, "chartable", "--group", "Z3")
    assert code == 0
    assert "[x^2 + x + 1]" in out


def test_chartable_file_error(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n0 1 2\n1 2 0\n2 2 1\n")
    code, _, err = run(capsys, "chartable", "--group", str(bad))
    assert code == 2
    assert "line 4" in err


def test_groupdet(capsys):
    code, doc = run_json(capsys, "groupdet", "--group", "Q8", "--trials", "5")
    assert code == 0
    assert doc["passed"]


def test_invariants(capsys):
    code, doc = run_json(capsys, "invariants", "--group", "so:3", "--p", "2", "--r", "2")
    assert code == 0
    assert doc["data"]["count"] == 2


def test_out_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, "volume", "--group", "so:2", "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["command"] == "volume"


def test_bad_group_spec(capsys):
    code, _, err = run(capsys, "volume", "--group", "sp:4")
    assert code == 2
    assert "haarlab: error:" in err


def test_nodes_validation(capsys):
    code, _, _ = run(capsys, "volume", "--group", "so:3", "--nodes", "1")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "haarlab", "volume", "--group", "so:2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "OK" in proc.stdout


def test_orthogonality_defining_su2(capsys):
    code, doc = run_json(capsys, "orthogonality", "--group", "su:2", "--reps", "def")
    assert code == 0
    assert doc["data"]["gram_diagonal"] == pytest.approx([0.5] * 4, abs=1e-10)


def test_sample_g11_mean(capsys):
    code, doc = run_json(capsys, "sample", "--group", "so:3", "--samples", "2000", "--seed", "2")
    assert code == 0
    assert len(doc["data"]["matrices"]) == 2000
    assert abs(doc["data"]["mean_g11"]) < 3 * doc["data"]["stderr_g11"]


def test_groupdet_zero_trials(capsys):
    code, doc = run_json(capsys, "groupdet", "--group", "S3", "--trials", "0")
    assert code == 0
    assert doc["table"] == [] and doc["checks"] == []
