"""The four subriemannian structures on S^7: Hamiltonians and bracket-generating checks."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clifford import CliffordSystem
from .exact.linalg import RatMatrix, rank_nullspace
from .exact.poly import NQ, Poly, inner, xi_vars
from .liealg import SkewMat, lie_closure, so8
from .sampling import random_sphere_point


class StructureKind(enum.Enum):
    T4 = "t4"
    T5 = "t5"
    T6H = "t6h"  # rank 6 trivializable structure; equals the Hopf contact structure
    QH = "qh"

    @classmethod
    def parse(cls, tag: str) -> "StructureKind":
        t = tag.strip().lower()
        if t in ("t6", "h", "hopf"):
            t = "t6h"
        return cls(t)

    @property
    def rank(self) -> int:
        return {"t4": 4, "t5": 5, "t6h": 6, "qh": 4}[self.value]


def linear_form(a) -> Poly:
    """F_A(q, xi) = <A q, xi> for a matrix A."""
    m = a.m if isinstance(a, SkewMat) else a
    terms = {}
    for l in range(NQ):
        for k in range(NQ):
            c = m[l, k]
            if c:
                p = Poly.q(k) * Poly.xi(l)
                (key,) = p.terms
                terms[key] = terms.get(key, 0) + c
    return Poly(terms)


def xi_norm2() -> Poly:
    return inner(xi_vars(), xi_vars())


def frame_for(kind: StructureKind, cs: CliffordSystem) -> list[tuple[Fraction, np.ndarray, str]]:
    """(weight, matrix, name) with H = c0 |xi|^2 / 2 + 1/2 sum weight F_E^2.

    For T-kinds c0 = 0 and the weights are +1 over A_1..A_j.  For QH c0 = 1 and
    the vertical generators A6, A7, A6A7 carry weight -1.
    """
    if kind is StructureKind.QH:
        return [(-1, cs.a(6), "A6"), (-1, cs.a(7), "A7"), (-1, cs.hopf_k, "A6A7")]
    j = {StructureKind.T4: 4, StructureKind.T5: 5, StructureKind.T6H: 6}[kind]
    return [(1, cs.a(i), f"A{i}") for i in range(1, j + 1)]


def has_kinetic_term(kind: StructureKind) -> bool:
    return kind is StructureKind.QH


@dataclass(frozen=True, eq=False)
class SRHamiltonian:
    kind: StructureKind
    poly: Poly
    frame: tuple  # (weight, matrix, name)
    kinetic: bool  # whether 1/2 |xi|^2 is part of the definition

    def float_poly(self):
        return self.poly.to_float()


def build_hamiltonian(kind: StructureKind | str, cs: CliffordSystem) -> SRHamiltonian:
    if isinstance(kind, str):
        kind = StructureKind.parse(kind)
    frame = frame_for(kind, cs)
    acc = xi_norm2() * Fraction(1, 2) if has_kinetic_term(kind) else Poly.zero()
    for w, m, _ in frame:
        f = linear_form(m)
        acc = acc + (f * f) * Fraction(w, 2)
    return SRHamiltonian(kind, acc, tuple(frame), has_kinetic_term(kind))


def sub_hamiltonian_j(j: int, cs: CliffordSystem) -> Poly:
    """1/2 sum_{i<=j} <A_i q, xi>^2."""
    acc = Poly.zero()
    for i in range(1, j + 1):
        f = linear_form(cs.a(i))
        acc = acc + f * f
    return acc * Fraction(1, 2)


# ---- bracket generation ------------------------------------------------------------

def _exact_q(point) -> list[Fraction]:
    num, den = point
    return [Fraction(a, den) for a in num]


def vector_rank(vectors: Sequence[Sequence]) -> int:
    vs = [list(v) for v in vectors]
    if not vs:
        return 0
    return rank_nullspace(RatMatrix.from_rows(vs, len(vs[0])))[0]


def _apply(m, q) -> list:
    return [sum((m[r, c] * q[c] for c in range(NQ) if m[r, c]), Fraction(0)) for r in range(NQ)]


def sample_sphere_points(seed: int, count: int) -> list[list[Fraction]]:
    rng = random.Random(seed)
    return [_exact_q(random_sphere_point(rng)) for _ in range(count)]


@dataclass
class BracketGeneratingReport:
    j: int
    closure_dim: int
    eval_dims: list[int]
    step2_dims: list[int]

    @property
    def bracket_generating(self) -> bool:
        return bool(self.eval_dims) and min(self.eval_dims) == 7

    @property
    def step_two(self) -> bool:
        return bool(self.step2_dims) and min(self.step2_dims) == 7

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "closure_dim": self.closure_dim,
            "samples": len(self.eval_dims),
            "eval_dim_min": min(self.eval_dims),
            "eval_dim_max": max(self.eval_dims),
            "step2_dim_min": min(self.step2_dims),
            "step2_dim_max": max(self.step2_dims),
            "bracket_generating": self.bracket_generating,
            "step_two": self.step_two,
        }


def bracket_generating_report(j: int, cs: CliffordSystem, samples: Sequence[Sequence[Fraction]]) -> BracketGeneratingReport:
    for q in samples:
        if sum(x * x for x in q) != 1:
            raise ValueError("sample point is not on the unit sphere")
    alg = so8(cs)
    closure = [alg.from_coords(v).m for v in lie_closure(alg, [alg.element((i,)) for i in range(1, j + 1)])]
    step2 = [cs.a(i) for i in range(1, j + 1)] + [cs.product(i, k) for i in range(1, j + 1) for k in range(i + 1, j + 1)]
    eval_dims, step2_dims = [], []
    for q in samples:
        eval_dims.append(vector_rank([_apply(m, q) for m in closure]))
        step2_dims.append(vector_rank([_apply(m, q) for m in step2]))
    return BracketGeneratingReport(j, len(closure), eval_dims, step2_dims)


def frame_gram_is_identity(cs: CliffordSystem, q: Sequence[Fraction]) -> bool:
    """{q, A_1 q, ..., A_7 q} is an orthonormal basis of R^8 at a unit q."""
    vecs = [list(q)] + [_apply(cs.a(i), q) for i in range(1, 8)]
    for a in range(8):
        for b in range(8):
            g = sum((x * y for x, y in zip(vecs[a], vecs[b])), Fraction(0))
            if g != (1 if a == b else 0):
                return False
    return True


@dataclass
class FatReport:
    rank_j5_north_pole: int
    rank_j4_north_pole: int
    j6_trials: int
    j6_ranks: list[int]

    @property
    def j6_all_full(self) -> bool:
        return all(r == 7 for r in self.j6_ranks)

    def to_json(self) -> dict:
        return {
            "rank_j5_north_pole": self.rank_j5_north_pole,
            "rank_j4_north_pole": self.rank_j4_north_pole,
            "j6_trials": self.j6_trials,
            "j6_min_rank": min(self.j6_ranks) if self.j6_ranks else None,
            "j6_statement": f"no counterexample found in {self.j6_trials} trials" if self.j6_all_full else "counterexample found",
        }


NORTH_POLE = [Fraction(1)] + [Fraction(0)] * 7


def fat_counterexample_check(cs: CliffordSystem, trials: int = 100, seed: int = 0) -> FatReport:
    """Horizontal-bracket ranks for the distributions spanned by X(A_{8-j}), ..., X(A_7).

    j = 5 and j = 4 use q = north pole and Y = A5 q; j = 6 draws random q and a
    random nonzero horizontal C = sum_{l=2..7} c_l A_l.
    """
    q = NORTH_POLE
    a5 = cs.a(5)
    v5 = [_apply(cs.a(l), q) for l in range(3, 8)] + [_apply(a5.dot(cs.a(r)), q) for r in (3, 4, 6, 7)]
    v4 = [_apply(cs.a(l), q) for l in range(4, 8)] + [_apply(a5.dot(cs.a(r)), q) for r in (4, 6, 7)]
    rng = random.Random(seed)
    ranks = []
    for _ in range(trials):
        qq = _exact_q(random_sphere_point(rng))
        coeffs = [0] * 6
        while not any(coeffs):
            coeffs = [rng.randint(-5, 5) for _ in range(6)]
        c = sum((cs.a(l) * coeffs[l - 2] for l in range(2, 8)), np.zeros((8, 8), dtype=object))
        vecs = []
        for l in range(2, 8):
            al = cs.a(l)
            vecs.append(_apply(al, qq))
            vecs.append(_apply(c.dot(al) - al.dot(c), qq))
        ranks.append(vector_rank(vecs))
    return FatReport(vector_rank(v5), vector_rank(v4), trials, ranks)


def frame_names(kind: StructureKind, cs: CliffordSystem) -> list[str]:
    return [name for _, _, name in frame_for(kind, cs)]


__all__ = [
    "BracketGeneratingReport",
    "FatReport",
    "SRHamiltonian",
    "StructureKind",
    "bracket_generating_report",
    "build_hamiltonian",
    "fat_counterexample_check",
    "frame_for",
    "frame_gram_is_identity",
    "linear_form",
    "sample_sphere_points",
    "sub_hamiltonian_j",
    "xi_norm2",
]
