"""Momentum map, Poisson brackets and the Thimm first integrals of the three chains."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .clifford import CliffordSystem
from .exact.linalg import RatMatrix, rank_nullspace
from .exact.poly import NQ, Poly, q_vars, xi_vars
from .liealg import SubalgebraChain, build_chain
from .sampling import ExactEvaluator, ScaledPoint, random_phase_point
from .srgeom import SRHamiltonian, StructureKind, build_hamiltonian, linear_form
from .variety import FAIL, INCONCLUSIVE, PASS, certify_on_variety

# structures whose Hamiltonians are decomposed along each chain
CHAIN_STRUCTURES = {
    "G": (StructureKind.T5, StructureKind.QH),
    "H": (StructureKind.T4,),
    "K": (StructureKind.T6H,),
}

# chain levels (outer, middle, inner) with H = 1/4 I_outer - I_middle + I_inner
DECOMPOSITIONS = {
    StructureKind.T5: ("G", 7, 6, 5),
    StructureKind.QH: ("G", 7, 6, 4),
    StructureKind.T4: ("H", 7, 6, 5),
    StructureKind.T6H: ("K", 7, 6, 5),
}


def poisson_bracket(f: Poly, g: Poly) -> Poly:
    """sum_i df/dq_i dg/dxi_i - df/dxi_i dg/dq_i."""
    acc = Poly.zero()
    for i in range(NQ):
        fq, gx = f.diff_q(i), g.diff_xi(i)
        if fq and gx:
            acc = acc + fq * gx
        fx, gq = f.diff_xi(i), g.diff_q(i)
        if fx and gq:
            acc = acc - fx * gq
    return acc


class MomentumMap:
    """(q, xi) -> q ^ xi = (xi q^T - q xi^T) / 2, paired with so(8) through B."""

    def __init__(self, cs: CliffordSystem):
        self.cs = cs

    @staticmethod
    def wedge() -> list[list[Poly]]:
        q, xi = q_vars(), xi_vars()
        half = Fraction(1, 2)
        return [[(xi[i] * q[j] - q[i] * xi[j]) * half for j in range(NQ)] for i in range(NQ)]

    def pairing(self, eta) -> Poly:
        """B(eta, q ^ xi) as a polynomial."""
        m = eta.m if hasattr(eta, "m") else eta
        w = self.wedge()
        acc = Poly.zero()
        for i in range(NQ):
            for j in range(NQ):
                if m[i, j]:
                    acc = acc + w[i][j] * m[i, j]
        return acc

    def function(self, eta) -> Poly:
        """F_eta(q, xi) = <eta q, xi>."""
        return linear_form(eta)


@dataclass(frozen=True, eq=False)
class FirstIntegralSet:
    kind: str
    integrals: tuple  # I_1..I_7
    chain: SubalgebraChain
    alt_integrals: tuple | None = None

    def integral(self, level: int) -> Poly:
        return self.integrals[level - 1]


def build_integrals(chain: SubalgebraChain, cs: CliffordSystem | None = None) -> FirstIntegralSet:
    """I_l = 1/2 sum over generators E of level l of <E q, xi>^2."""
    cache: dict = {}

    def sq(label):
        if label not in cache:
            f = linear_form(chain.algebra.element(label))
            cache[label] = f * f
        return cache[label]

    integrals = []
    for lvl in range(1, 8):
        acc = Poly.zero()
        for lab in chain.generator_labels(lvl):
            acc = acc + sq(lab)
        integrals.append(acc * Fraction(1, 2))
    alt = None
    if chain.kind == "G":
        alg = chain.algebra
        f = lambda lab: linear_form(alg.element(lab))  # noqa: E731
        alt = []
        for l in range(1, 5):
            acc = Poly.zero()
            for i in range(1, l + 1):
                acc = acc + sq((i, l + 1))
            alt.append(acc)
        alt.append(f((6, 7)))
        alt.append(sq((6,)) + sq((7,)))
        h5 = Poly.zero()
        for i in range(1, 6):
            h5 = h5 + sq((i,))
        alt.append(h5 * Fraction(1, 2))
        alt = tuple(alt)
    return FirstIntegralSet(chain.kind, tuple(integrals), chain, alt)


@dataclass
class Check:
    name: str
    status: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, **self.detail}


@dataclass
class InvolutionReport:
    chain: str
    pair_checks: list[Check]
    hamiltonian_checks: list[Check]

    @property
    def status(self) -> str:
        sts = [c.status for c in self.pair_checks + self.hamiltonian_checks]
        if FAIL in sts:
            return FAIL
        if INCONCLUSIVE in sts:
            return INCONCLUSIVE
        return PASS

    def to_json(self) -> dict:
        return {
            "chain": self.chain.lower(),
            "pairs_checked": len(self.pair_checks),
            "pairs_zero_on_R16": sum(c.status == PASS for c in self.pair_checks),
            "pair_failures": [c.to_json() for c in self.pair_checks if c.status != PASS],
            "hamiltonian_checks": [c.to_json() for c in self.hamiltonian_checks],
            "status": self.status,
        }


def _witness(p: Poly, seed: int) -> list[str] | None:
    rng = random.Random(seed)
    ev = ExactEvaluator(p)
    for _ in range(50):
        pt = random_phase_point(rng)
        if not ev.is_zero_at(pt):
            return [str(x) for x in pt.coords()]
    return None


def verify_involution(iset: FirstIntegralSet, hamiltonians: Sequence[SRHamiltonian], samples: int = 1000, seed: int = 0) -> InvolutionReport:
    pairs = []
    for a, b in combinations(range(1, 8), 2):
        br = poisson_bracket(iset.integral(a), iset.integral(b))
        if br.is_zero():
            pairs.append(Check(f"I{a},I{b}", PASS))
        else:
            pairs.append(Check(f"I{a},I{b}", FAIL, {"terms": len(br), "witness": _witness(br, seed)}))
    hchecks = []
    for h in hamiltonians:
        per_level = []
        status = PASS
        for lvl in range(1, 8):
            br = poisson_bracket(h.poly, iset.integral(lvl))
            cert = certify_on_variety(br, samples=samples, seed=seed + lvl)
            per_level.append({"level": lvl, "identically_zero": br.is_zero(), **cert.to_json()})
            if cert.status != PASS:
                status = cert.status if status == PASS else status
        hchecks.append(Check(f"H_{h.kind.value}", status, {"levels": per_level}))
    return InvolutionReport(iset.kind, pairs, hchecks)


# ---- independence ----------------------------------------------------------------------

def thimm_matrix(iset: FirstIntegralSet, pt: ScaledPoint) -> list[list[Fraction]]:
    """Rows: coordinates of pi_l(q ^ xi) in the 28-element basis, l = 1..7."""
    alg = iset.chain.algebra
    coords = []
    for lab in alg.labels:
        val = ExactEvaluator(linear_form(alg.element(lab))).value(pt)
        coords.append(val / 8)
    rows = []
    for lvl in range(1, 8):
        keep = iset.chain.index_set(lvl)
        rows.append([c if n in keep else Fraction(0) for n, c in enumerate(coords)])
    return rows


def gradient_rank(polys: Sequence[Poly], pt: ScaledPoint) -> int:
    rows = []
    for p in polys:
        rows.append([ExactEvaluator(p.diff(v)).value(pt) for v in range(2 * NQ)])
    return rank_nullspace(RatMatrix.from_rows(rows, 2 * NQ))[0]


@dataclass
class IndependenceReport:
    chain: str
    points: int
    ranks: list[int]
    gradient_ranks: list[int]
    resamples: int
    status: str

    def to_json(self) -> dict:
        return {
            "chain": self.chain.lower(),
            "points": self.points,
            "thimm_ranks": self.ranks,
            "gradient_ranks": self.gradient_ranks,
            "resamples": self.resamples,
            "status": self.status,
        }


def verify_independence(iset: FirstIntegralSet, trials: int = 20, points: int = 5, seed: int = 0,
                        forced_points: Sequence[ScaledPoint] = ()) -> IndependenceReport:
    """Exact rank of the 7x28 projection matrix at ``points`` random points of the variety.

    A degenerate point (rank < 7) is resampled, up to ``trials`` draws per point.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    ranks, granks = [], []
    resamples = 0
    queue = list(forced_points)
    for _ in range(points):
        got = None
        for _ in range(trials):
            pt = queue.pop(0) if queue else random_phase_point(rng)
            r = rank_nullspace(RatMatrix.from_rows(thimm_matrix(iset, pt), 28))[0]
            if r == 7:
                got = (r, gradient_rank(iset.integrals, pt))
                break
            resamples += 1
        if got is None:
            return IndependenceReport(iset.kind, len(ranks), ranks, granks, resamples, INCONCLUSIVE)
        ranks.append(got[0])
        granks.append(got[1])
    return IndependenceReport(iset.kind, points, ranks, granks, resamples, PASS)


# ---- decompositions --------------------------------------------------------------------

@dataclass
class DecompositionResult:
    structure: StructureKind
    chain: str
    levels: tuple
    on_variety: dict
    identically_zero: bool
    off_variety_value: str
    off_variety_nonzero: bool
    residual_terms: int

    @property
    def status(self) -> str:
        return self.on_variety["status"]

    def to_json(self) -> dict:
        return {
            "structure": self.structure.value,
            "chain": self.chain.lower(),
            "identity": "H = 1/4 I%d - I%d + I%d" % self.levels,
            "on_variety": self.on_variety,
            "residual_identically_zero": self.identically_zero,
            "residual_terms": self.residual_terms,
            "off_variety_residual": self.off_variety_value,
            "off_variety_nonzero": self.off_variety_nonzero,
        }


# |q|^2 = 5 and <q, xi> = 1: off the variety in both constraints
OFF_VARIETY_POINT = [Fraction(x) for x in (1, 1, 1, 1, 0, 0, 1, 0)] + [Fraction(x) for x in (1, 0, 0, 0, 1, 2, 0, -1)]


def decomposition_residual(structure: StructureKind, cs: CliffordSystem, integral_sets: dict | None = None) -> Poly:
    chain_kind, outer, middle, inner_ = DECOMPOSITIONS[structure]
    if integral_sets and chain_kind in integral_sets:
        iset = integral_sets[chain_kind]
    else:
        iset = build_integrals(build_chain(chain_kind, cs))
    h = build_hamiltonian(structure, cs)
    rhs = iset.integral(outer) * Fraction(1, 4) - iset.integral(middle) + iset.integral(inner_)
    return h.poly - rhs


def verify_decompositions(cs: CliffordSystem, integral_sets: dict | None = None, samples: int = 1000, seed: int = 0) -> list[DecompositionResult]:
    out = []
    for structure, (chain_kind, *levels) in DECOMPOSITIONS.items():
        res = decomposition_residual(structure, cs, integral_sets)
        cert = certify_on_variety(res, samples=samples, seed=seed)
        off = res.evaluate(OFF_VARIETY_POINT)
        out.append(DecompositionResult(structure, chain_kind, tuple(levels), cert.to_json(), res.is_zero(), str(off), off != 0, len(res)))
    return out


__all__ = [
    "CHAIN_STRUCTURES",
    "DECOMPOSITIONS",
    "FirstIntegralSet",
    "MomentumMap",
    "OFF_VARIETY_POINT",
    "build_integrals",
    "decomposition_residual",
    "gradient_rank",
    "poisson_bracket",
    "thimm_matrix",
    "verify_decompositions",
    "verify_independence",
    "verify_involution",
]
