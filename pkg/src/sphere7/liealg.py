"""so(8) with the trace form, and the three Thimm chains G, H, K of subalgebras."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .clifford import BASIS_LABELS, CliffordSystem, frozen, is_skew, label_name, matrix_equal
from .exact.linalg import RatMatrix, rank_nullspace

NBASIS = 28
BASIS_NORM = 8  # B(E, E) for every basis element


class ChainError(RuntimeError):
    pass


class SkewMat:
    """Immutable exact skew-symmetric 8x8 matrix."""

    __slots__ = ("m",)

    def __init__(self, m, check: bool = True):
        arr = frozen(m)
        if check and not is_skew(arr):
            raise ValueError("matrix is not skew-symmetric")
        self.m = arr

    @classmethod
    def zero(cls) -> "SkewMat":
        return cls(np.zeros((8, 8), dtype=int), check=False)

    def __add__(self, other: "SkewMat") -> "SkewMat":
        return SkewMat(self.m + other.m, check=False)

    def __sub__(self, other: "SkewMat") -> "SkewMat":
        return SkewMat(self.m - other.m, check=False)

    def __neg__(self) -> "SkewMat":
        return SkewMat(-self.m, check=False)

    def __mul__(self, c) -> "SkewMat":
        return SkewMat(self.m * c, check=False)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewMat):
            return NotImplemented
        return matrix_equal(self.m, other.m)

    def __hash__(self) -> int:
        return hash(tuple(self.m.flatten().tolist()))

    def is_zero(self) -> bool:
        return not any(self.m.flatten())

    def __repr__(self) -> str:
        return f"SkewMat({self.m.tolist()})"


def bracket(x: SkewMat, y: SkewMat) -> SkewMat:
    return SkewMat(x.m.dot(y.m) - y.m.dot(x.m), check=False)


def form_b(x: SkewMat, y: SkewMat):
    return sum(a * b for a, b in zip(x.m.flatten().tolist(), y.m.flatten().tolist()))


class So8:
    """Coordinates in the basis {A_i} u {A_iA_j} and the inverse map."""

    def __init__(self, cs: CliffordSystem):
        self.cs = cs
        self.labels = BASIS_LABELS
        self.elements = [SkewMat(m) for _, m in cs.basis()]
        self._flat = [e.m.flatten().tolist() for e in self.elements]
        self.index = {lab: n for n, lab in enumerate(self.labels)}

    def coords(self, x: SkewMat) -> list:
        """c with x = sum c_n E_n; c_n = B(x, E_n) / 8."""
        xf = x.m.flatten().tolist()
        out = []
        for ef in self._flat:
            s = sum(a * b for a, b in zip(ef, xf) if a)
            out.append(_norm(Fraction(s, BASIS_NORM)))
        return out

    def from_coords(self, c: Sequence) -> SkewMat:
        acc = np.zeros((8, 8), dtype=object)
        for n, v in enumerate(c):
            if v:
                acc = acc + self.elements[n].m * v
        return SkewMat(acc, check=False)

    def element(self, label: tuple[int, ...]) -> SkewMat:
        return self.elements[self.index[tuple(label)]]


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


_SO8_CACHE: dict[int, So8] = {}


def so8(cs: CliffordSystem) -> So8:
    key = id(cs)
    if key not in _SO8_CACHE:
        _SO8_CACHE[key] = So8(cs)
    return _SO8_CACHE[key]


# ---- chain generator lists (labels) ------------------------------------------------

def _pairs_upto(n: int) -> list[tuple[int, int]]:
    return [p for p in combinations(range(1, n + 1), 2)]


def chain_labels(kind: str) -> list[list[tuple[int, ...]]]:
    kind = kind.upper()
    full = list(BASIS_LABELS)
    if kind == "G":
        levels = [_pairs_upto(l + 1) for l in range(1, 5)]
        g5 = _pairs_upto(5) + [(6, 7)]
        levels += [g5, g5 + [(6,), (7,)], full]
    elif kind == "H":
        levels = [_pairs_upto(l + 1) for l in range(1, 4)]
        levels.append(_pairs_upto(4) + [(5, 6)])
        h5 = _pairs_upto(4) + [(5, 6), (5, 7), (6, 7)]
        levels += [h5, h5 + [(5,), (6,), (7,)], full]
    elif kind == "K":
        levels = [_pairs_upto(l + 1) for l in range(1, 6)]
        levels += [_pairs_upto(6) + [(7,)], full]
    else:
        raise ValueError(f"unknown chain kind {kind!r}")
    return [[tuple(x) for x in lev] for lev in levels]


EXPECTED_DIMS = {
    "G": (1, 3, 6, 10, 11, 13, 28),
    "H": (1, 3, 6, 7, 9, 12, 28),
    "K": (1, 3, 6, 10, 15, 16, 28),
}

# (dimension, center dimension, derived algebra dimension) of the isomorphism
# types of the non-simple members
EXPECTED_TYPES = {
    ("G", 5): ("so(5)+so(2)", 11, 1, 10),
    ("G", 6): ("so(5)+so(3)", 13, 0, 13),
    ("H", 4): ("so(4)+so(2)", 7, 1, 6),
    ("H", 5): ("so(4)+so(3)", 9, 0, 9),
    ("H", 6): ("so(4)+so(4)", 12, 0, 12),
    ("K", 6): ("so(6)+so(2)", 16, 1, 15),
}


@dataclass
class ChainCertificate:
    dims: tuple
    closure_ok: list[bool]
    inclusion_ok: list[bool]
    thimm_ok: list[bool]
    orthogonal_ok: list[bool]
    gram_diag_8: list[bool]
    types: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.closure_ok + self.inclusion_ok + self.thimm_ok + self.orthogonal_ok + self.gram_diag_8) and all(
            t["ok"] for t in self.types.values()
        )

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "closure": self.closure_ok,
            "strict_inclusion": self.inclusion_ok,
            "thimm_condition": self.thimm_ok,
            "orthogonal_generators": self.orthogonal_ok,
            "gram_diagonal_8": self.gram_diag_8,
            "types": self.types,
            "ok": self.ok,
        }


@dataclass(frozen=True, eq=False)
class SubalgebraChain:
    kind: str
    labels: tuple  # seven tuples of basis labels
    members: tuple  # seven tuples of SkewMat
    certificate: ChainCertificate
    algebra: So8

    def dims(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.members)

    def generators(self, level: int) -> tuple:
        return self.members[level - 1]

    def generator_labels(self, level: int) -> tuple:
        return self.labels[level - 1]

    def index_set(self, level: int) -> set[int]:
        return {self.algebra.index[lab] for lab in self.labels[level - 1]}


def _support(coords: Sequence) -> set[int]:
    return {n for n, c in enumerate(coords) if c != 0}


def in_span_of_labels(alg: So8, x: SkewMat, idx: set[int]) -> bool:
    return _support(alg.coords(x)) <= idx


def center_dimension(alg: So8, gens: Sequence[SkewMat]) -> int:
    """dim {X in span(gens) : [X, g] = 0 for all g}."""
    n = len(gens)
    rows = []
    # column a holds coords of [gens[a], g]; stack over g
    brackets = [[alg.coords(bracket(a, g)) for a in gens] for g in gens]
    for g_block in brackets:
        for r in range(NBASIS):
            rows.append([g_block[a][r] for a in range(n)])
    rank, _ = rank_nullspace(RatMatrix.from_rows(rows, n))
    return n - rank


def derived_dimension(alg: So8, gens: Sequence[SkewMat]) -> int:
    rows = [alg.coords(bracket(a, b)) for a, b in combinations(gens, 2)]
    if not rows:
        return 0
    return rank_nullspace(RatMatrix.from_rows(rows, NBASIS))[0]


def span_dimension(alg: So8, elements: Iterable[SkewMat]) -> int:
    rows = [alg.coords(e) for e in elements]
    if not rows:
        return 0
    return rank_nullspace(RatMatrix.from_rows(rows, NBASIS))[0]


def build_chain(kind: str, cs: CliffordSystem) -> SubalgebraChain:
    """Generator sets for the chain, certified for closure, inclusion and orthogonality."""
    kind = kind.upper()
    alg = so8(cs)
    labels = chain_labels(kind)
    members = [tuple(alg.element(lab) for lab in lev) for lev in labels]
    idx_sets = [{alg.index[lab] for lab in lev} for lev in labels]
    dims = tuple(len(m) for m in members)

    closure, inclusion, thimm, orth, gram = [], [], [], [], []
    for lvl, (gens, idx) in enumerate(zip(members, idx_sets), 1):
        ok = True
        if lvl < 7:
            for a, b in combinations(gens, 2):
                if not in_span_of_labels(alg, bracket(a, b), idx):
                    ok = False
                    break
        closure.append(ok)
        orth.append(all(form_b(a, b) == 0 for a, b in combinations(gens, 2)))
        gram.append(all(form_b(a, a) == BASIS_NORM for a in gens))
        if lvl < 7:
            nxt = idx_sets[lvl]
            inclusion.append(idx < nxt and span_dimension(alg, members[lvl]) > span_dimension(alg, gens))
            good = True
            for a in gens:
                for b in members[lvl]:
                    if not in_span_of_labels(alg, bracket(a, b), nxt):
                        good = False
            thimm.append(good)
    types = {}
    for (k, lvl), (name, dim, cdim, ddim) in EXPECTED_TYPES.items():
        if k != kind:
            continue
        gens = members[lvl - 1]
        got = (len(gens), center_dimension(alg, gens), derived_dimension(alg, gens))
        types[str(lvl)] = {"type": name, "dim": got[0], "center_dim": got[1], "derived_dim": got[2], "ok": got == (dim, cdim, ddim)}
    cert = ChainCertificate(dims, closure, inclusion, thimm, orth, gram, types)
    if dims != EXPECTED_DIMS[kind] or not cert.ok:
        raise ChainError(f"chain {kind} failed certification: {cert.to_json()}")
    return SubalgebraChain(kind, tuple(tuple(l) for l in labels), tuple(members), cert, alg)


def project(chain: SubalgebraChain, level: int, x: SkewMat) -> SkewMat:
    """Orthogonal projection onto the level's span: sum B(x,E)/B(E,E) E."""
    alg = chain.algebra
    c = alg.coords(x)
    keep = chain.index_set(level)
    return alg.from_coords([v if n in keep else 0 for n, v in enumerate(c)])


def lie_closure(alg: So8, gens: Sequence[SkewMat], max_rounds: int = 28) -> list[list]:
    """Coordinate basis (in echelon-free form) of the Lie algebra generated by ``gens``."""
    basis: list[list] = []

    def try_add(v) -> bool:
        if not any(v):
            return False
        if rank_nullspace(RatMatrix.from_rows(basis + [v], NBASIS))[0] > len(basis):
            basis.append(v)
            return True
        return False

    for g in gens:
        try_add(alg.coords(g))
    for _ in range(max_rounds):
        grown = False
        current = [alg.from_coords(v) for v in basis]
        for a, b in combinations(current, 2):
            if len(basis) == NBASIS:
                break
            if try_add(alg.coords(bracket(a, b))):
                grown = True
        if not grown or len(basis) == NBASIS:
            break
    return basis


def export_chain(kind: str) -> dict:
    labels = chain_labels(kind)
    return {
        "kind": kind.lower(),
        "dims": [len(l) for l in labels],
        "members": [[list(lab) for lab in lev] for lev in labels],
        "names": [[label_name(lab) for lab in lev] for lev in labels],
    }
