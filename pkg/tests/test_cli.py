from __future__ import annotations

import csv
import json

import pytest

from sphere7.cli import main
from sphere7.report import strip_timing


def run_json(capsys, *argv):
    code = main([*argv, "--json", "-", "--quiet"])
    return code, json.loads(capsys.readouterr().out)


def test_clifford_suite_passes(capsys):
    code, js = run_json(capsys, "verify", "--suite", "clifford")
    assert code == 0 and js["status"] == "pass"
    assert [c["check"] for c in js["checks"]] == sorted(c["check"] for c in js["checks"])


def test_involution_suite_for_g_chain(capsys):
    code, js = run_json(capsys, "verify", "--suite", "involution", "--chain", "g")
    assert code == 0
    pairs = next(c for c in js["checks"] if c["check"] == "involution-g-pairs")
    assert pairs["result"]["pairs_checked"] == 21
    assert all(c["status"] == "pass" for c in js["checks"])


def test_isometry_suite_for_qh(capsys):
    code, js = run_json(capsys, "verify", "--suite", "isometry", "--structure", "qh")
    assert code == 0
    kernel = next(c for c in js["checks"] if c["check"] == "isometry-qh")
    assert kernel["result"]["dimension"] == 13


def test_failing_suite_exits_one(capsys):
    code, js = run_json(capsys, "verify", "--suite", "decompositions")
    assert code == 1 and js["status"] == "fail"
    failed = {c["check"] for c in js["checks"] if c["status"] == "fail"}
    assert failed == {f"decomposition-{s}-off-variety-control" for s in ("t4", "t5", "t6h")}


def test_io_error_exits_three(tmp_path):
    assert main(["verify", "--suite", "clifford", "--quiet", "--json", str(tmp_path / "missing" / "out.json")]) == 3


def test_constraint_violation_exits_four(capsys):
    assert main(["integrate", "--structure", "t5", "--q", "2,0,0,0,0,0,0,0", "--xi", "zero", "--quiet"]) == 4
    assert main(["integrate", "--structure", "t5", "--q", "1,0,0,0,0,0,0,0", "--xi", "1,0,0,0,0,0,0,0", "--quiet"]) == 4
    assert "constraints" in capsys.readouterr().err


def test_invalid_numeric_arguments_rejected():
    with pytest.raises(SystemExit):
        main(["integrate", "--structure", "t5", "--dt", "-1"])
    with pytest.raises(SystemExit):
        main(["verify", "--samples", "0"])


def test_zero_covector_run_is_constant(tmp_path, capsys):
    out = tmp_path / "eq.csv"
    code, js = run_json(capsys, "integrate", "--structure", "t4", "--xi", "zero", "--t-end", "1", "--dt", "0.01",
                        "--csv", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert len({tuple(r[1:17]) for r in rows[1:]}) == 1


def test_reduced_run_writes_csv_and_sidecar(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    code, js = run_json(capsys, "integrate", "--structure", "t5", "--reduced-q1-norm2", "1/3", "--t-end", "9.4248",
                        "--csv", str(out), "--every", "100")
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t"] + [f"q{i}" for i in range(1, 9)] + [f"xi{i}" for i in range(1, 9)] + ["H"] + [
        f"I{i}" for i in range(1, 8)]
    assert float(rows[-1][0]) == 9.4248
    side = json.loads((tmp_path / "traj.csv.json").read_text())
    assert set(side) == {"structure", "dt", "scheme", "t_end", "drift_stats"}
    assert max(side["drift_stats"].values()) < 1e-9
    assert js["return_distance_q"] < 1e-4
    assert js["periodicity"]["ratio"] == pytest.approx(2.0)


@pytest.mark.slow
def test_qh_seeded_run_conserves(capsys):
    code, js = run_json(capsys, "integrate", "--structure", "qh", "--seed", "7", "--t-end", "10")
    assert code == 0
    drift = next(c for c in js["checks"] if c["check"] == "conservation")["result"]["drift_stats"]
    assert max(drift.values()) < 1e-9


def test_isometry_command_json(capsys):
    code, js = run_json(capsys, "isometry", "--structure", "t5")
    assert code == 0
    assert js["dimension"] == 11 and js["certified"]


@pytest.mark.slow
def test_operators_command_json(capsys):
    code, js = run_json(capsys, "operators", "--family", "g")
    assert code == 0
    for key in ("pairs_checked", "failures", "sublaplacian_ok", "qh_identity_ok", "symbols_match"):
        assert key in js
    assert js["pairs_checked"] == 21 and js["failures"] == []


def test_exports(capsys):
    assert main(["export-matrices"]) == 0
    mats = json.loads(capsys.readouterr().out)
    assert mats
    assert main(["export-chain", "--kind", "h"]) == 0
    assert json.loads(capsys.readouterr().out)
    assert main(["export-integrals", "--chain", "k"]) == 0
    assert set(json.loads(capsys.readouterr().out)["integrals"]) == {f"I{i}" for i in range(1, 8)}


def test_seeded_reports_are_identical(capsys):
    argv = ["verify", "--suite", "independence", "--chain", "h", "--seed", "5"]
    _, first = run_json(capsys, *argv)
    _, second = run_json(capsys, *argv)
    assert json.dumps(strip_timing(first), sort_keys=True) == json.dumps(strip_timing(second), sort_keys=True)
