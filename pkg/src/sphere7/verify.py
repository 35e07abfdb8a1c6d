"""Verification suites: each returns a list of CheckResult records."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .clifford import CliffordSystem, build_clifford_system, verify_orthonormal_basis
from .integrals import (
    CHAIN_STRUCTURES,
    build_integrals,
    verify_decompositions,
    verify_independence,
    verify_involution,
)
from .isometry import EXPECTED_KERNELS, compute_kernel, finite_isometry_spotcheck
from .liealg import ChainError, build_chain, so8
from .operators import verify_family
from .report import FAIL, INCONCLUSIVE, PASS, CheckResult, Report, combine, status_of
from .srgeom import (
    StructureKind,
    bracket_generating_report,
    build_hamiltonian,
    fat_counterexample_check,
    sample_sphere_points,
)

SUITES = ("clifford", "chains", "involution", "independence", "decompositions", "bracket", "isometry", "operators")
CHAINS = ("g", "h", "k")


@dataclass
class VerifyConfig:
    suite: str = "all"
    seed: int = 0
    chain: str | None = None
    structure: str | None = None
    samples: int = 1000
    independence_points: int = 5
    independence_trials: int = 20
    bracket_samples: int = 100
    fat_trials: int = 100
    kernel_samples: int = 60
    kernel_check_points: int = 500
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.chain is not None and self.chain.lower() not in CHAINS:
            raise ValueError(f"unknown chain {self.chain!r}")
        for name in ("samples", "independence_points", "independence_trials", "bracket_samples", "fat_trials",
                     "kernel_samples", "kernel_check_points"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def chains(self) -> list[str]:
        return [self.chain.lower()] if self.chain else list(CHAINS)

    def structures(self) -> list[StructureKind]:
        return [StructureKind.parse(self.structure)] if self.structure else list(StructureKind)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "chain": self.chain,
            "structure": self.structure,
            "samples": self.samples,
            "independence_points": self.independence_points,
            "independence_trials": self.independence_trials,
            "bracket_samples": self.bracket_samples,
            "fat_trials": self.fat_trials,
            "kernel_samples": self.kernel_samples,
            "kernel_check_points": self.kernel_check_points,
        }


def suite_clifford(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    rep = verify_orthonormal_basis(cs)
    rel = CheckResult(
        "clifford-relations", "clifford-system", status_of(not rep.relation_failures),
        {}, {"relations_checked": rep.relations_checked, "failures": len(rep.relation_failures)},
        [list(p) for p in rep.relation_failures],
    )
    js = rep.to_json()
    basis = CheckResult(
        "clifford-trace-form", "trace-form-orthogonal-basis", status_of(rep.ok),
        {}, {k: js[k] for k in ("self_pairings_all_8", "cross_pairings_checked", "quartic_traces_checked")},
        js["cross_failures"] + js["quartic_trace_failures"],
    )
    return [rel, basis]


def suite_chains(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    out = []
    for c in cfg.chains():
        try:
            chain = build_chain(c, cs)
            out.append(CheckResult(f"chain-{c}", f"subalgebra-chain-{c}", PASS, {}, chain.certificate.to_json()))
        except ChainError as err:
            out.append(CheckResult(f"chain-{c}", f"subalgebra-chain-{c}", FAIL, {}, {}, [str(err)]))
    return out


def _integral_sets(cs: CliffordSystem, chains: Sequence[str]) -> dict:
    return {c.upper(): build_integrals(build_chain(c, cs)) for c in chains}


def suite_involution(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    out = []
    for n, c in enumerate(cfg.chains()):
        iset = build_integrals(build_chain(c, cs))
        hams = [build_hamiltonian(k, cs) for k in CHAIN_STRUCTURES[c.upper()]]
        rep = verify_involution(iset, hams, samples=cfg.samples, seed=cfg.seed + 100 * n)
        js = rep.to_json()
        pair_status = combine(ch.status for ch in rep.pair_checks)
        out.append(CheckResult(
            f"involution-{c}-pairs", f"poisson-commuting-{c}", pair_status, {"samples": cfg.samples},
            {"pairs_checked": js["pairs_checked"], "pairs_zero_on_R16": js["pairs_zero_on_R16"]},
            js["pair_failures"],
        ))
        for h in rep.hamiltonian_checks:
            levels = h.detail["levels"]
            out.append(CheckResult(
                f"involution-{c}-{h.name.lower()}", f"hamiltonian-commutes-{c}", h.status, {"samples": cfg.samples},
                {"levels": [{k: v for k, v in lv.items() if k in ("level", "identically_zero", "method", "status")} for lv in levels]},
                [lv["witness"] for lv in levels if lv.get("witness")],
            ))
    return out


def suite_independence(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    out = []
    for n, c in enumerate(cfg.chains()):
        iset = build_integrals(build_chain(c, cs))
        rep = verify_independence(iset, trials=cfg.independence_trials, points=cfg.independence_points,
                                  seed=cfg.seed + 200 + n)
        js = rep.to_json()
        out.append(CheckResult(
            f"independence-{c}", f"projection-rank-7-{c}", rep.status,
            {"points": cfg.independence_points, "trials": cfg.independence_trials},
            {"thimm_ranks": js["thimm_ranks"], "resamples": js["resamples"],
             "diagnostic_gradient_ranks_on_R16": js["gradient_ranks"]},
        ))
    return out


def suite_decompositions(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    out = []
    wanted = {k for k in cfg.structures()}
    for res in verify_decompositions(cs, _integral_sets(cs, CHAINS), samples=cfg.samples, seed=cfg.seed + 300):
        if res.structure not in wanted:
            continue
        js = res.to_json()
        tag = res.structure.value
        out.append(CheckResult(
            f"decomposition-{tag}", f"hamiltonian-decomposition-{tag}", res.status, {"samples": cfg.samples},
            {"identity": js["identity"], "chain": js["chain"], "on_variety": js["on_variety"],
             "residual_identically_zero": js["residual_identically_zero"]},
        ))
        out.append(CheckResult(
            f"decomposition-{tag}-off-variety-control", f"residual-nonzero-off-variety-{tag}",
            status_of(res.off_variety_nonzero), {"point": "q=(1,1,1,1,0,0,1,0), xi=(1,0,0,0,1,2,0,-1)"},
            {"off_variety_residual": js["off_variety_residual"], "residual_terms": js["residual_terms"]},
            [] if res.off_variety_nonzero else ["residual is the zero polynomial on R^16"],
        ))
    return out


def suite_bracket(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    pts = sample_sphere_points(cfg.seed + 400, cfg.bracket_samples)
    out = []
    for j in (3, 4, 5, 6):
        rep = bracket_generating_report(j, cs, pts)
        js = rep.to_json()
        if j == 3:
            ok = rep.closure_dim <= 6 and max(rep.eval_dims) <= 6
            out.append(CheckResult("bracket-j3", "not-bracket-generating-j3", status_of(ok),
                                   {"samples": cfg.bracket_samples}, js))
        else:
            out.append(CheckResult(f"bracket-j{j}", f"bracket-generating-step-two-j{j}",
                                   status_of(rep.bracket_generating and rep.step_two),
                                   {"samples": cfg.bracket_samples}, js))
    fat = fat_counterexample_check(cs, trials=cfg.fat_trials, seed=cfg.seed + 500)
    fj = fat.to_json()
    out.append(CheckResult("fat-j5-north-pole", "not-fat-tilde-j5", status_of(fat.rank_j5_north_pole == 5), {},
                           {"rank": fat.rank_j5_north_pole}))
    out.append(CheckResult("fat-j4-north-pole", "not-fat-tilde-j4", status_of(fat.rank_j4_north_pole == 5), {},
                           {"rank": fat.rank_j4_north_pole}))
    out.append(CheckResult("fat-j6-random", "fat-j6-no-counterexample", status_of(fat.j6_all_full),
                           {"trials": cfg.fat_trials}, {"min_rank": fj["j6_min_rank"], "statement": fj["j6_statement"]}))
    return out


def suite_isometry(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    out = []
    alg = so8(cs)
    for n, kind in enumerate(cfg.structures()):
        h = build_hamiltonian(kind, cs)
        k = compute_kernel(h, cs, samples=cfg.kernel_samples, seed=cfg.seed + 600 + n,
                           check_points=cfg.kernel_check_points)
        _, _, name, dim = EXPECTED_KERNELS[kind]
        ok = k.certified and k.closed and k.span_equal and k.two_way_agree and k.dimension == dim
        js = k.to_json()
        out.append(CheckResult(f"isometry-{kind.value}", f"killing-kernel-{name}", status_of(ok),
                               {"samples": cfg.kernel_samples, "check_points": cfg.kernel_check_points},
                               {key: js[key] for key in ("dimension", "basis_indices", "certified", "closed_under_bracket",
                                                         "expected", "expected_dimension", "span_equal",
                                                         "obstruction_two_ways_agree")}))
        # one kernel element must move H by roundoff only; a non-kernel element must not
        inside = alg.from_coords(k.basis[-1]) if k.basis else None
        outside = alg.element((1, 6)) if kind is not StructureKind.T6H else alg.element((1, 7))
        spot_in = finite_isometry_spotcheck(h, inside, (0.3, 0.7), points=20, seed=cfg.seed + 650 + n) if inside else None
        spot_out = finite_isometry_spotcheck(h, outside, (0.3, 0.7), points=20, seed=cfg.seed + 650 + n)
        ok_spot = spot_in is not None and spot_in.invariant and not spot_out.invariant
        out.append(CheckResult(f"isometry-{kind.value}-finite-flow", f"finite-isometry-{name}", status_of(ok_spot),
                               {"times": [0.3, 0.7], "points": 20, "tolerance": 1e-10},
                               {"kernel_element_max_violation": max(spot_in.max_violation) if spot_in else None,
                                "non_kernel_element_max_violation_exceeds_tolerance": not spot_out.invariant}))
    return out


def suite_operators(cfg: VerifyConfig, cs: CliffordSystem) -> list[CheckResult]:
    out = []
    for fam in cfg.chains():
        rep = verify_family(fam, cs)
        js = rep.to_json()
        out.append(CheckResult(f"operators-{fam}", f"commuting-operators-{fam}", status_of(rep.ok), {},
                               {k: js[k] for k in ("pairs_checked", "pairs_zero", "sublaplacian_ok", "qh_identity_ok",
                                                   "symbols_match", "decision_monomials")}
                               | {"named_checks": len(js["named_checks"]),
                                  "negative_control_detected": js["negative_control"]["ok"]},
                               js["failures"]))
    return out


RUNNERS: dict[str, Callable[[VerifyConfig, CliffordSystem], list[CheckResult]]] = {
    "clifford": suite_clifford,
    "chains": suite_chains,
    "involution": suite_involution,
    "independence": suite_independence,
    "decompositions": suite_decompositions,
    "bracket": suite_bracket,
    "isometry": suite_isometry,
    "operators": suite_operators,
}


def run_verify(cfg: VerifyConfig, progress: Callable[[str], None] | None = None) -> Report:
    cs = build_clifford_system()
    report = Report("verify", cfg.suite, cfg.to_json())
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    for name in names:
        t0 = time.perf_counter()
        checks = RUNNERS[name](cfg, cs)
        report.timing[name] = round(time.perf_counter() - t0, 3)
        report.extend(checks)
        if progress:
            progress(f"{name}: {combine(c.status for c in checks)} ({len(checks)} checks)")
    return report


__all__ = ["CHAINS", "INCONCLUSIVE", "SUITES", "VerifyConfig", "run_verify"]
