"""Command-line front end: verify, integrate, isometry, operators, exports."""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import geodesics
from .clifford import build_clifford_system, export_matrices
from .integrals import build_integrals
from .isometry import compute_kernel
from .liealg import build_chain, export_chain
from .operators import verify_family
from .report import (
    EXIT_CONSTRAINT,
    EXIT_FAIL,
    EXIT_IO,
    EXIT_OK,
    CheckResult,
    Report,
    dumps,
    status_of,
)
from .sampling import random_float_phase_point
from .srgeom import StructureKind, build_hamiltonian
from .verify import SUITES, VerifyConfig, run_verify

DRIFT_TOLERANCE = 1e-9
CONSTRAINT_TOLERANCE = 1e-10


class InitialStateError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """'p/q', an integer, or a decimal string, kept exact."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from err


def parse_number(text: str) -> float:
    t = text.strip()
    try:
        return float(Fraction(t)) if "/" in t else float(t)
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from err


def positive_float(text: str) -> float:
    v = parse_number(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be positive and finite")
    return v


def nonnegative_float(text: str) -> float:
    v = parse_number(text)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be nonnegative and finite")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from err
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def seed_value(text: str) -> int:
    try:
        v = int(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from err
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def vector8(text: str) -> list[float]:
    parts = [p for p in text.replace(" ", ",").split(",") if p]
    if len(parts) != 8:
        raise argparse.ArgumentTypeError("expected 8 comma-separated numbers")
    return [parse_number(p) for p in parts]


def structure_kind(text: str) -> StructureKind:
    try:
        return StructureKind.parse(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"unknown structure {text!r}") from err


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=seed_value, default=argparse.SUPPRESS if suppress else 0,
                        help="seed for every randomized choice (default 0)")
    parser.add_argument("--json", nargs="?", const="-", default=d, metavar="PATH",
                        help="write the JSON report to PATH ('-' or no value: stdout)")
    parser.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="suppress the text summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphere7", description="Exact and numerical checks for subriemannian structures on S^7.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    _global_flags(v, suppress=True)
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--chain", choices=("g", "h", "k"), type=str.lower)
    v.add_argument("--structure", type=str.lower, choices=("t4", "t5", "t6h", "t6", "h", "qh"))
    v.add_argument("--samples", type=positive_int, default=1000)
    v.add_argument("--trials", type=positive_int, default=20, help="resampling budget per independence point")
    v.add_argument("--points", type=positive_int, default=5, help="independence points per chain")

    g = sub.add_parser("integrate", help="integrate a geodesic flow")
    _global_flags(g, suppress=True)
    g.add_argument("--structure", type=structure_kind, required=True)
    g.add_argument("--reduced-q1-norm2", type=parse_rational, metavar="P/Q",
                   help="start from the reduced data with |q1|^2 = P/Q and xi = (k q1, k q2)")
    g.add_argument("--q", type=vector8, help="initial q as 8 comma-separated numbers")
    g.add_argument("--xi", type=str, help="initial xi as 8 comma-separated numbers, or 'zero'")
    g.add_argument("--t-end", type=nonnegative_float, default=10.0)
    g.add_argument("--dt", type=positive_float, default=1e-3)
    g.add_argument("--scheme", choices=geodesics.SCHEMES, default="rk4")
    g.add_argument("--csv", metavar="PATH", help="trajectory CSV; metadata goes to PATH.json")
    g.add_argument("--every", type=positive_int, default=1, help="write every n-th step")

    i = sub.add_parser("isometry", help="kernel of A -> {H, F_A}")
    _global_flags(i, suppress=True)
    i.add_argument("--structure", type=structure_kind, required=True)
    i.add_argument("--samples", type=positive_int, default=60)

    o = sub.add_parser("operators", help="commuting operator family checks")
    _global_flags(o, suppress=True)
    o.add_argument("--family", choices=("g", "h", "k"), type=str.lower, required=True)

    em = sub.add_parser("export-matrices", help="A1..A7 and the products A_iA_j")
    _global_flags(em, suppress=True)
    ec = sub.add_parser("export-chain", help="generator labels of a chain")
    _global_flags(ec, suppress=True)
    ec.add_argument("--kind", choices=("g", "h", "k"), type=str.lower, required=True)
    ei = sub.add_parser("export-integrals", help="I1..I7 of a chain as exact polynomials")
    _global_flags(ei, suppress=True)
    ei.add_argument("--chain", choices=("g", "h", "k"), type=str.lower, required=True)
    return parser


# ---- output ---------------------------------------------------------------------------

def emit(payload: dict | str, path: str | None, quiet: bool, text: Sequence[str] = ()) -> None:
    body = payload if isinstance(payload, str) else dumps(payload)
    if path == "-":
        sys.stdout.write(body)
    elif path:
        Path(path).write_text(body, encoding="utf-8")
    if not quiet and path != "-":
        for line in text:
            print(line)


# ---- commands -------------------------------------------------------------------------

def cmd_verify(args) -> int:
    cfg = VerifyConfig(suite=args.suite, seed=args.seed, chain=args.chain, structure=args.structure,
                       samples=args.samples, independence_trials=args.trials, independence_points=args.points)
    progress = None if (args.quiet or args.json == "-") else (lambda s: print(s, file=sys.stderr))
    report = run_verify(cfg, progress)
    emit(report.to_json(), args.json, args.quiet, report.text_lines())
    return report.exit_code


def initial_point(args) -> tuple[geodesics.PhasePoint, geodesics.ReducedInitialData | None]:
    if args.reduced_q1_norm2 is not None:
        if args.q is not None or args.xi is not None:
            raise InitialStateError("--reduced-q1-norm2 cannot be combined with --q/--xi")
        s = args.reduced_q1_norm2
        if not 0 <= s <= 1:
            raise InitialStateError("|q1|^2 must lie in [0, 1]")
        data = geodesics.ReducedInitialData.from_q1_norm2(s)
        return data.phase_point(), data
    rng = np.random.default_rng(args.seed)
    q_rand, xi_rand = random_float_phase_point(rng)
    q = np.array(args.q, dtype=float) if args.q is not None else q_rand
    if args.xi is None:
        xi = xi_rand if args.q is None else np.zeros(8)
        if args.q is not None:
            # random unit covector tangent at the given q
            v = rng.standard_normal(8)
            v = v - np.dot(v, q) / max(np.dot(q, q), 1e-300) * q
            xi = v / np.linalg.norm(v)
    elif args.xi.strip().lower() == "zero":
        xi = np.zeros(8)
    else:
        xi = np.array(vector8(args.xi), dtype=float)
    p = geodesics.PhasePoint.from_arrays(q, xi)
    pairing, defect = p.constraint_residuals()
    if abs(pairing) > CONSTRAINT_TOLERANCE or abs(defect) > CONSTRAINT_TOLERANCE:
        raise InitialStateError(f"initial state violates the constraints: <q,xi> = {pairing:.3e}, |q|^2 - 1 = {defect:.3e}")
    return p, None


def write_csv(path: str, traj: geodesics.Trajectory, every: int = 1) -> None:
    header = ["t"] + [f"q{i}" for i in range(1, 9)] + [f"xi{i}" for i in range(1, 9)] + ["H"] + [f"I{i}" for i in range(1, 8)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        last = len(traj.times) - 1
        for n, t in enumerate(traj.times):
            if n % every and n != last:
                continue
            row = [t, *traj.states[n, 0], *traj.integrals_log[n, 0]]
            w.writerow(["%.17g" % float(x) for x in row])


def cmd_integrate(args) -> int:
    try:
        p0, data = initial_point(args)
    except InitialStateError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONSTRAINT
    kind = args.structure
    t0 = time.perf_counter()
    try:
        traj = geodesics.integrate(kind, p0, args.t_end, args.dt, args.scheme, tol=CONSTRAINT_TOLERANCE)
    except geodesics.IntegrationError as err:
        report = Report("integrate", kind.value, {"dt": args.dt, "t_end": args.t_end, "scheme": args.scheme})
        report.add(CheckResult("integration", "finite-trajectory", "fail", {}, {"last_valid_time": err.last_valid_time}, [str(err)]))
        emit(report.to_json(), args.json, args.quiet, report.text_lines())
        return EXIT_FAIL
    elapsed = time.perf_counter() - t0
    stats = traj.drift_stats()
    final = traj.states[-1, 0]
    q, xi = final[:8], final[8:]
    params = {"structure": kind.value, "dt": args.dt, "t_end": args.t_end, "scheme": args.scheme, "seed": args.seed,
              "initial_q": [float(x) for x in p0.q], "initial_xi": [float(x) for x in p0.xi]}
    report = Report("integrate", kind.value, params)
    report.add(CheckResult("conservation", "integrals-conserved", status_of(max(stats.values()) < DRIFT_TOLERANCE),
                           {"tolerance": DRIFT_TOLERANCE}, {"drift_stats": stats}))
    pairing = np.abs(np.sum(traj.states[:, 0, :8] * traj.states[:, 0, 8:], axis=1))
    defect = np.abs(np.sum(traj.states[:, 0, :8] ** 2, axis=1) - 1)
    report.add(CheckResult("constraints", "stays-on-tangent-bundle",
                           status_of(max(pairing.max(), defect.max()) < DRIFT_TOLERANCE), {"tolerance": DRIFT_TOLERANCE},
                           {"max_pairing": float(pairing.max()), "max_sphere_defect": float(defect.max()),
                            "final_pairing": float(np.dot(q, xi)), "final_sphere_defect": float(np.dot(q, q) - 1)}))
    if data is not None:
        per = geodesics.periodicity_diagnostic(data)
        cf_err = geodesics.max_closed_form_error(traj, data)
        ret = float(np.max(np.abs(final[:8] - traj.states[0, 0, :8])))
        report.add(CheckResult("closed-form", "reduced-solution-matches", status_of(cf_err < 1e-8),
                               {"tolerance": 1e-8}, {"max_error": cf_err}))
        report.extra["periodicity"] = per.to_json()
        report.extra["return_distance_q"] = ret
    report.timing["integrate"] = round(elapsed, 3)
    if args.csv:
        write_csv(args.csv, traj, args.every)
        side = {"structure": kind.value, "dt": args.dt, "scheme": args.scheme, "t_end": args.t_end, "drift_stats": stats}
        Path(args.csv + ".json").write_text(dumps(side), encoding="utf-8")
    lines = report.text_lines() + [f"max relative drift: {max(stats.values()):.3e}"]
    if data is not None:
        lines.append(f"periodicity: {report.extra['periodicity']['label']}")
    emit(report.to_json(), args.json, args.quiet, lines)
    return report.exit_code


def cmd_isometry(args) -> int:
    cs = build_clifford_system()
    h = build_hamiltonian(args.structure, cs)
    k = compute_kernel(h, cs, samples=args.samples, seed=args.seed)
    js = k.to_json()
    ok = k.certified and k.closed and k.span_equal and k.dimension == k.expected_dimension
    lines = [f"{args.structure.value}: kernel dimension {k.dimension}, certified={k.certified}, "
             f"equals {k.expected_name}: {k.span_equal}"]
    emit(js, args.json, args.quiet, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_operators(args) -> int:
    rep = verify_family(args.family)
    js = rep.to_json()
    lines = [f"family {args.family}: {js['pairs_zero']}/{js['pairs_checked']} pairs commute, "
             f"sublaplacian_ok={js['sublaplacian_ok']}, symbols_match={js['symbols_match']}, qh_identity_ok={js['qh_identity_ok']}"]
    emit(js, args.json, args.quiet, lines)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_export_matrices(args) -> int:
    emit(export_matrices(build_clifford_system()), args.json or "-", args.quiet)
    return EXIT_OK


def cmd_export_chain(args) -> int:
    build_chain(args.kind, build_clifford_system())  # certify before exporting
    emit(export_chain(args.kind), args.json or "-", args.quiet)
    return EXIT_OK


def cmd_export_integrals(args) -> int:
    iset = build_integrals(build_chain(args.chain, build_clifford_system()))
    payload = {
        "chain": args.chain,
        "variables": [f"q{i}" for i in range(1, 9)] + [f"xi{i}" for i in range(1, 9)],
        "integrals": {f"I{n}": p.to_json() for n, p in enumerate(iset.integrals, 1)},
    }
    emit(payload, args.json or "-", args.quiet)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "integrate": cmd_integrate,
    "isometry": cmd_isometry,
    "operators": cmd_operators,
    "export-matrices": cmd_export_matrices,
    "export-chain": cmd_export_chain,
    "export-integrals": cmd_export_integrals,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
