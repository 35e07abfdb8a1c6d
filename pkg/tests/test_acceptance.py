"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from sphere7.geodesics import (
    PhasePoint,
    ReducedInitialData,
    closed_form_reduced,
    closed_form_residual,
    integrate,
    max_closed_form_error,
)
from sphere7.report import strip_timing
from sphere7.sampling import random_float_phase_point
from sphere7.srgeom import StructureKind
from sphere7.verify import VerifyConfig, run_verify

SEED = 42


def announce(number: int, title: str, ok: bool, elapsed: float, detail: str, capsys) -> None:
    with capsys.disabled():
        print(f"\nCRITERION {number:2d} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f} s)  {detail}")


def run_suite(suite: str):
    t0 = time.perf_counter()
    rep = run_verify(VerifyConfig(suite=suite, seed=SEED))
    checks = {c.check: c for c in rep.checks}
    return checks, time.perf_counter() - t0


def failed(checks) -> list[str]:
    return sorted(name for name, c in checks.items() if c.status != "pass")


def test_criterion_01_clifford(capsys):
    checks, dt = run_suite("clifford")
    rel, form = checks["clifford-relations"].result, checks["clifford-trace-form"].result
    ok = (not failed(checks) and rel["relations_checked"] == 49 and rel["failures"] == 0
          and form["self_pairings_all_8"] and dt < 1.0)
    announce(1, "Clifford relations and trace form", ok, dt, f"relations={rel['relations_checked']}", capsys)
    assert ok


def test_criterion_02_chains(capsys):
    checks, dt = run_suite("chains")
    expected = {"g": [1, 3, 6, 10, 11, 13, 28], "h": [1, 3, 6, 7, 9, 12, 28], "k": [1, 3, 6, 10, 15, 16, 28]}
    dims = {k: checks[f"chain-{k}"].result["dims"] for k in expected}
    ok = (not failed(checks) and dims == expected and dt < 5.0
          and all(checks[f"chain-{k}"].result["closure"] and checks[f"chain-{k}"].result["thimm_condition"] for k in expected))
    announce(2, "subalgebra chains", ok, dt, f"dims={dims}", capsys)
    assert ok


def test_criterion_03_involution(capsys):
    checks, dt = run_suite("involution")
    pairs = {k: checks[f"involution-{k}-pairs"].result for k in "ghk"}
    ok = (not failed(checks) and dt < 60.0
          and all(p["pairs_checked"] == 21 and p["pairs_zero_on_R16"] == 21 for p in pairs.values())
          and {"involution-g-h_t5", "involution-h-h_t4", "involution-k-h_t6h"} <= set(checks))
    announce(3, "Poisson involution", ok, dt, f"failed={failed(checks)}", capsys)
    assert ok


def test_criterion_04_independence(capsys):
    checks, dt = run_suite("independence")
    ranks = {k: checks[f"independence-{k}"].result["thimm_ranks"] for k in "ghk"}
    ok = not failed(checks) and dt < 10.0 and all(len(r) >= 5 and set(r) == {7} for r in ranks.values())
    announce(4, "functional independence", ok, dt, f"ranks={ranks}", capsys)
    assert ok


def test_criterion_05_decompositions(capsys):
    checks, dt = run_suite("decompositions")
    on_variety = all(checks[f"decomposition-{s}"].status == "pass" for s in ("t5", "qh", "t4", "t6h"))
    controls = {s: checks[f"decomposition-{s}-off-variety-control"].result["off_variety_residual"]
                for s in ("t5", "qh", "t4", "t6h")}
    ok = on_variety and not failed(checks) and dt < 30.0
    announce(5, "Hamiltonian decompositions", ok, dt,
             f"on_variety={on_variety} off_variety_residuals={controls}", capsys)
    assert ok


def test_criterion_06_bracket_generation(capsys):
    checks, dt = run_suite("bracket")
    step2 = {j: checks[f"bracket-j{j}"].result["step2_dim_min"] for j in (4, 5, 6)}
    closure3 = checks["bracket-j3"].result["closure_dim"]
    fat = (checks["fat-j4-north-pole"].result["rank"], checks["fat-j5-north-pole"].result["rank"],
           checks["fat-j6-random"].result["min_rank"])
    ok = (not failed(checks) and dt < 30.0 and all(v == 7 for v in step2.values()) and closure3 <= 6
          and fat == (5, 5, 7) and checks["bracket-j4"].result["samples"] == 100)
    announce(6, "bracket generation and fatness", ok, dt, f"step2={step2} j3_closure={closure3} fat={fat}", capsys)
    assert ok


def test_criterion_07_isometry(capsys):
    checks, dt = run_suite("isometry")
    expected = {"t4": 9, "t5": 11, "t6h": 16, "qh": 13}
    dims = {s: checks[f"isometry-{s}"].result["dimension"] for s in expected}
    each = all(checks[f"isometry-{s}"].result[k] for s in expected
               for k in ("span_equal", "closed_under_bracket", "obstruction_two_ways_agree", "certified"))
    ok = not failed(checks) and dims == expected and each and dt < 120.0
    announce(7, "isometry kernels", ok, dt, f"dims={dims}", capsys)
    assert ok


def test_criterion_08_operators(capsys):
    checks, dt = run_suite("operators")
    res = {k: checks[f"operators-{k}"].result for k in "ghk"}
    ok = (not failed(checks) and dt < 120.0
          and all(r["pairs_zero"] == 21 and r["sublaplacian_ok"] and r["symbols_match"]
                  and r["negative_control_detected"] and r["decision_monomials"] == 165 for r in res.values())
          and res["g"]["qh_identity_ok"] is True)
    announce(8, "commuting operator families", ok, dt, f"failed={failed(checks)}", capsys)
    assert ok


def test_criterion_09_geodesics(capsys):
    t0 = time.perf_counter()
    data = ReducedInitialData.from_q1_norm2(1 / 3)
    residual = max(closed_form_residual(data, float(t), kind)
                   for t in np.linspace(0, 10, 101) for kind in (StructureKind.T4, StructureKind.T5))
    traj = integrate(StructureKind.T5, data.phase_point(), 10.0, 1e-3, log_every=10)
    match = max_closed_form_error(traj, data)
    ret = float(np.max(np.abs(np.array(closed_form_reduced(data, 3 * math.pi).q) - np.array(data.phase_point().q))))
    rng = np.random.default_rng(SEED)
    drift = {}
    for kind in StructureKind:
        pts = [PhasePoint.from_arrays(*random_float_phase_point(rng)) for _ in range(20)]
        drift[kind.value] = max(integrate(kind, pts, 10.0, 1e-3, log_every=100).drift_stats().values())
    coarse, fine = (max_closed_form_error(integrate(StructureKind.T5, data.phase_point(), 10.0, h), data)
                    for h in (0.02, 0.01))
    ratio = coarse / fine
    dt = time.perf_counter() - t0
    ok = (residual < 1e-11 and match < 1e-8 and ret < 1e-10 and max(drift.values()) < 1e-9
          and 12 <= ratio <= 20 and dt < 300)
    detail = (f"residual={residual:.2e} match={match:.2e} return={ret:.2e} "
              f"drift={max(drift.values()):.2e} ratio={ratio:.2f}")
    announce(9, "geodesic flows", ok, dt, detail, capsys)
    assert ok


def _verify_all_json() -> dict:
    out = subprocess.run([sys.executable, "-m", "sphere7", "verify", "--suite", "all", "--seed", str(SEED),
                          "--quiet", "--json", "-"], capture_output=True, text=True, check=False)
    assert out.returncode in (0, 1), out.stderr
    return json.loads(out.stdout)


@pytest.mark.slow
def test_criterion_10_determinism(capsys):
    t0 = time.perf_counter()
    first, second = _verify_all_json(), _verify_all_json()
    ok = json.dumps(strip_timing(first), sort_keys=True) == json.dumps(strip_timing(second), sort_keys=True)
    announce(10, "seeded determinism", ok, time.perf_counter() - t0,
             f"checks={first['summary']['total']} status={first['status']}", capsys)
    assert ok
