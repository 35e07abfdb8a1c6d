"""Linear Killing fields: the kernel of A -> {H, F_A} on the unit tangent bundle."""

from __future__ import annotations

import random
from math import gcd
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .clifford import BASIS_LABELS, CliffordSystem, label_name
from .exact.linalg import RatMatrix, rank_nullspace, solve_in_span
from .exact.poly import Poly
from .integrals import poisson_bracket
from .liealg import NBASIS, SkewMat, bracket, build_chain, so8
from .sampling import ExactEvaluator, random_float_phase_point, random_phase_point
from .srgeom import SRHamiltonian, StructureKind, linear_form
from .variety import FAIL, PASS, certify_on_variety

# the subalgebra each kernel is expected to equal: (chain, level, name)
EXPECTED_KERNELS = {
    StructureKind.T4: ("H", 5, "h5", 9),
    StructureKind.T5: ("G", 5, "g5", 11),
    StructureKind.T6H: ("K", 6, "k6", 16),
    StructureKind.QH: ("G", 6, "g6", 13),
}


class ObstructionMismatch(RuntimeError):
    pass


def obstruction_by_bracket(h: SRHamiltonian, a: SkewMat) -> Poly:
    return poisson_bracket(h.poly, linear_form(a))


def obstruction_by_frame(h: SRHamiltonian, a: SkewMat) -> Poly:
    """sum_B w_B F_B F_[B,A]; the 1/2 |xi|^2 term of QH contributes nothing."""
    acc = Poly.zero()
    for w, m, _ in h.frame:
        b = SkewMat(m)
        comm = bracket(b, a)
        if comm.is_zero():
            continue
        acc = acc + linear_form(b) * linear_form(comm) * w
    return acc


def killing_obstruction(h: SRHamiltonian, a: SkewMat) -> Poly:
    """{H, F_A}, computed by the canonical bracket and by the frame sum; both must agree."""
    direct = obstruction_by_bracket(h, a)
    frame = obstruction_by_frame(h, a)
    if direct != frame:
        raise ObstructionMismatch(f"bracket and frame forms differ for {h.kind.value}")
    return direct


@dataclass
class KillingKernel:
    structure: StructureKind
    basis: list  # integer coordinate vectors in the 28-element basis
    dimension: int
    certified: bool
    sample_rows: int
    certification: list = field(default_factory=list)
    closed: bool = False
    expected_name: str = ""
    expected_dimension: int = 0
    span_equal: bool = False
    two_way_agree: bool = False

    def basis_matrices(self, cs: CliffordSystem) -> list[SkewMat]:
        alg = so8(cs)
        return [alg.from_coords(v) for v in self.basis]

    def basis_indices(self) -> list[list[int]] | None:
        """Basis labels when every kernel vector is a single basis element."""
        out = []
        labels = BASIS_LABELS
        for v in self.basis:
            nz = [n for n, c in enumerate(v) if c]
            if len(nz) != 1:
                return None
            out.append(list(labels[nz[0]]))
        return out

    def to_json(self) -> dict:
        idx = self.basis_indices()
        out = {
            "structure": self.structure.value,
            "dimension": self.dimension,
            "basis_indices": idx if idx is not None else [list(v) for v in self.basis],
            "basis_names": [label_name(tuple(l)) for l in idx] if idx is not None else None,
            "certified": self.certified,
            "closed_under_bracket": self.closed,
            "expected": self.expected_name,
            "expected_dimension": self.expected_dimension,
            "span_equal": self.span_equal,
            "obstruction_two_ways_agree": self.two_way_agree,
            "sample_rows": self.sample_rows,
        }
        return out


def _canonical_basis(null: list[list[int]]) -> list[list[int]]:
    """Reduced row echelon form of the nullspace, scaled to primitive integer rows."""
    if not null:
        return []
    rows = [[Fraction(x) for x in v] for v in null]
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    out = []
    for row in rows[:r]:
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def compute_kernel(h: SRHamiltonian, cs: CliffordSystem, samples: int = 60, seed: int = 0,
                   check_points: int = 500, max_retries: int = 3) -> KillingKernel:
    if samples < 60:
        raise ValueError("need at least 60 sample points for 28 unknowns")
    alg = so8(cs)
    obstructions = [killing_obstruction(h, e) for e in alg.elements]
    evaluators = [ExactEvaluator(p) for p in obstructions]
    rng = random.Random(seed)
    for attempt in range(max_retries):
        pts = [random_phase_point(rng) for _ in range(samples * (attempt + 1))]
        rows = [[ev.value(pt) for ev in evaluators] for pt in pts]
        _, null = rank_nullspace(RatMatrix.from_rows(rows, NBASIS))
        basis = _canonical_basis(null)
        certs = []
        ok = True
        for n, v in enumerate(basis):
            comb = Poly.zero()
            for c, p in zip(v, obstructions):
                if c:
                    comb = comb + p * c
            cert = certify_on_variety(comb, samples=check_points, seed=seed + 1000 + n)
            certs.append(cert.to_json())
            ok = ok and cert.status == PASS
        if ok:
            break
    # dense exact re-evaluation of the whole kernel
    check_rng = random.Random(seed + 7)
    check_pts = [random_phase_point(check_rng) for _ in range(check_points)]
    dense_ok = True
    if basis:
        for pt in check_pts:
            vals = [ev.value(pt) for ev in evaluators]
            if any(sum((c * x for c, x in zip(v, vals) if c), Fraction(0)) != 0 for v in basis):
                dense_ok = False
                break
    k = KillingKernel(h.kind, basis, len(basis), ok and dense_ok, len(pts), certs)
    k.two_way_agree = True  # killing_obstruction raises on disagreement
    k.closed = kernel_closed(k, cs)
    chain_kind, level, name, dim = EXPECTED_KERNELS[h.kind]
    k.expected_name, k.expected_dimension = name, dim
    chain = build_chain(chain_kind, cs)
    gens = [alg.coords(g) for g in chain.generators(level)]
    in_kernel = all(solve_in_span(basis, g) is not None for g in gens)
    k.span_equal = in_kernel and k.dimension == len(gens) == dim
    return k


def kernel_closed(k: KillingKernel, cs: CliffordSystem) -> bool:
    alg = so8(cs)
    mats = [alg.from_coords(v) for v in k.basis]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = alg.coords(bracket(mats[i], mats[j]))
            if solve_in_span(k.basis, c) is None:
                return False
    return True


@dataclass
class SpotcheckReport:
    structure: str
    element: str
    times: list[float]
    max_violation: list[float]
    tolerance: float

    @property
    def invariant(self) -> bool:
        return all(v < self.tolerance for v in self.max_violation)

    def to_json(self) -> dict:
        return {
            "structure": self.structure,
            "element": self.element,
            "times": self.times,
            "max_violation": self.max_violation,
            "invariant": self.invariant,
        }


def finite_isometry_spotcheck(h: SRHamiltonian, a: SkewMat, ts: Sequence[float], points: int = 50, seed: int = 0,
                              tolerance: float = 1e-10, name: str = "") -> SpotcheckReport:
    """|H(e^{tA} q, e^{tA} xi) - H(q, xi)| at random floating points of the variety."""
    fh = h.poly.to_float()
    am = np.array(a.m, dtype=float)
    rng = np.random.default_rng(seed)
    pts = [random_float_phase_point(rng) for _ in range(points)]
    base = np.array([np.concatenate([q, xi]) for q, xi in pts])
    h0 = fh(base)
    worst = []
    for t in ts:
        g = expm(t * am)
        moved = np.array([np.concatenate([g @ q, g @ xi]) for q, xi in pts])
        worst.append(float(np.max(np.abs(fh(moved) - h0))))
    return SpotcheckReport(h.kind.value, name, list(ts), worst, tolerance)


__all__ = [
    "EXPECTED_KERNELS",
    "FAIL",
    "KillingKernel",
    "ObstructionMismatch",
    "PASS",
    "compute_kernel",
    "finite_isometry_spotcheck",
    "kernel_closed",
    "killing_obstruction",
    "obstruction_by_bracket",
    "obstruction_by_frame",
]
