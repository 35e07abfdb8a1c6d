"""Seven anticommuting skew-symmetric 8x8 matrices on R^8 = H x H.

Quaternion coordinates are ordered (1, i, j, k) in each factor.  Matrices
are numpy object arrays holding Python ints, so every product is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .exact.poly import NQ, Poly

DIM = 8
PAIRS = tuple(combinations(range(1, 8), 2))


def exact_matrix(rows) -> np.ndarray:
    m = np.array([[int(x) for x in r] for r in rows], dtype=object)
    m.setflags(write=False)
    return m


def frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=object)
    m.setflags(write=False)
    return m


def quat_mul(a, b) -> tuple:
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


UNIT = {"1": (1, 0, 0, 0), "i": (0, 1, 0, 0), "j": (0, 0, 1, 0), "k": (0, 0, 0, 1)}


def _basis4(m: int) -> tuple:
    return tuple(int(i == m) for i in range(4))


def left_mult(x) -> np.ndarray:
    """4x4 matrix of h -> x h."""
    cols = [quat_mul(x, _basis4(m)) for m in range(4)]
    return exact_matrix([[cols[m][r] for m in range(4)] for r in range(4)])


def right_mult(x) -> np.ndarray:
    """4x4 matrix of h -> h x."""
    cols = [quat_mul(_basis4(m), x) for m in range(4)]
    return exact_matrix([[cols[m][r] for m in range(4)] for r in range(4)])


def _neg(x) -> tuple:
    return tuple(-c for c in x)


def block(a, b, c, d) -> np.ndarray:
    return frozen(np.block([[a, b], [c, d]]))


def identity(n: int = DIM) -> np.ndarray:
    return exact_matrix(np.eye(n, dtype=int))


ZERO4 = exact_matrix(np.zeros((4, 4), dtype=int))
ID4 = exact_matrix(np.eye(4, dtype=int))

# the displayed 4x4 block of A3; it is right multiplication by -i
B3 = exact_matrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])


def matrix_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a == b))


def is_skew(m: np.ndarray) -> bool:
    return matrix_equal(m.T, -m)


def trace(m: np.ndarray):
    return sum(m[i, i] for i in range(m.shape[0]))


def form_b(x: np.ndarray, y: np.ndarray):
    """Trace form B(X, Y) = Tr(X^T Y)."""
    return sum(x[i, j] * y[i, j] for i in range(x.shape[0]) for j in range(x.shape[1]))


class CliffordError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CliffordSystem:
    matrices: tuple  # A1..A7

    def __post_init__(self):
        basis = [((i,), self.matrices[i - 1]) for i in range(1, 8)]
        basis += [((i, j), frozen(self.matrices[i - 1].dot(self.matrices[j - 1]))) for i, j in PAIRS]
        object.__setattr__(self, "_basis", tuple(basis))

    def a(self, i: int) -> np.ndarray:
        """A_i with 1-based index."""
        return self.matrices[i - 1]

    def product(self, *indices: int) -> np.ndarray:
        m = identity()
        for i in indices:
            m = m.dot(self.a(i))
        return frozen(m)

    @property
    def hopf_k(self) -> np.ndarray:
        """K = A6 A7, the third generator of the quaternionic Hopf vertical space."""
        return self.product(6, 7)

    def basis(self) -> tuple[tuple[tuple[int, ...], np.ndarray], ...]:
        """The 28-element basis of so(8): A_i (label (i,)) then A_iA_j, i<j (label (i,j))."""
        return self._basis

    def element(self, label: tuple[int, ...]) -> np.ndarray:
        return self._basis[BASIS_LABELS.index(tuple(label))][1]


BASIS_LABELS: tuple[tuple[int, ...], ...] = tuple([(i,) for i in range(1, 8)] + list(PAIRS))


def label_name(label: tuple[int, ...]) -> str:
    return "".join(f"A{i}" for i in label)


def clifford_relation_failures(mats) -> list[tuple[int, int]]:
    bad = []
    eye = identity()
    for i in range(7):
        for j in range(7):
            lhs = mats[i].dot(mats[j]) + mats[j].dot(mats[i])
            rhs = -2 * eye if i == j else 0 * eye
            if not matrix_equal(lhs, rhs):
                bad.append((i + 1, j + 1))
    return bad


@lru_cache(maxsize=None)
def build_clifford_system() -> CliffordSystem:
    """A1..A7 with A3..A7 in the standard quaternionic block form.

    A1 and A2 are the anti-diagonal blocks of right multiplication by -j and
    -k; together with A3 (right multiplication by -i) they anticommute with
    each other and commute past the left multiplications in A5..A7.
    """
    r_mj = right_mult(_neg(UNIT["j"]))
    r_mk = right_mult(_neg(UNIT["k"]))
    li, lj, lk = (left_mult(UNIT[c]) for c in "ijk")
    mats = (
        block(ZERO4, r_mj, r_mj, ZERO4),
        block(ZERO4, r_mk, r_mk, ZERO4),
        block(ZERO4, B3, B3, ZERO4),
        block(ZERO4, ID4, -ID4, ZERO4),
        block(li, ZERO4, ZERO4, -li),
        block(lj, ZERO4, ZERO4, -lj),
        block(lk, ZERO4, ZERO4, -lk),
    )
    if not matrix_equal(B3, right_mult(_neg(UNIT["i"]))):
        raise CliffordError("B3 is not right multiplication by -i")
    for n, m in enumerate(mats, 1):
        if not is_skew(m):
            raise CliffordError(f"A{n} is not skew-symmetric")
        if not set(m.flatten().tolist()) <= {-1, 0, 1}:
            raise CliffordError(f"A{n} has entries outside {{-1, 0, 1}}")
    bad = clifford_relation_failures(mats)
    if bad:
        raise CliffordError(f"Clifford relations fail for pairs {bad}")
    return CliffordSystem(mats)


@dataclass
class OrthonormalityReport:
    relations_checked: int
    relation_failures: list
    self_pairings: dict
    cross_failures: list
    quartic_trace_failures: list
    quartic_traces_checked: int

    @property
    def ok(self) -> bool:
        return (
            not self.relation_failures
            and not self.cross_failures
            and not self.quartic_trace_failures
            and all(v == 8 for v in self.self_pairings.values())
        )

    def to_json(self) -> dict:
        return {
            "relations_checked": self.relations_checked,
            "relation_failures": [list(p) for p in self.relation_failures],
            "self_pairings_all_8": all(v == 8 for v in self.self_pairings.values()),
            "cross_pairings_checked": 28 * 27 // 2,
            "cross_failures": [[label_name(a), label_name(b)] for a, b in self.cross_failures],
            "quartic_traces_checked": self.quartic_traces_checked,
            "quartic_trace_failures": [list(t) for t in self.quartic_trace_failures],
            "ok": self.ok,
        }


def verify_orthonormal_basis(cs: CliffordSystem) -> OrthonormalityReport:
    """Checks B(E,E) = 8 and B(E,F) = 0 on the 28 products, plus vanishing quartic traces."""
    basis = cs.basis()
    selfp = {}
    cross = []
    for n, (la, ma) in enumerate(basis):
        selfp[label_name(la)] = form_b(ma, ma)
        for lb, mb in basis[n + 1:]:
            if form_b(ma, mb) != 0:
                cross.append((la, lb))
    quartic_bad = []
    count = 0
    for idx in combinations(range(1, 8), 4):
        for perm in (idx, idx[::-1]):
            count += 1
            if trace(cs.product(*perm)) != 0:
                quartic_bad.append(perm)
    return OrthonormalityReport(49, clifford_relation_failures(cs.matrices), selfp, cross, quartic_bad, count)


@dataclass(frozen=True)
class LinearVectorField:
    """The vector field x -> A x on R^8 for a skew matrix A."""

    matrix: np.ndarray

    def at(self, q):
        return self.matrix.dot(np.array(q, dtype=object))

    def components(self) -> list[Poly]:
        """(A q)_l as linear polynomials in q."""
        out = []
        for l in range(NQ):
            p = Poly.zero()
            for k in range(NQ):
                c = self.matrix[l, k]
                if c:
                    p = p + Poly.q(k) * c
            out.append(p)
        return out

    def apply(self, p: Poly) -> Poly:
        return field_apply(self, p)


def field_apply(vf: LinearVectorField, p: Poly) -> Poly:
    """(A q) . grad p for a polynomial in q alone."""
    if not p.depends_only_on_q():
        raise ValueError("field_apply expects a polynomial in q only")
    out = Poly.zero()
    for l, comp in enumerate(vf.components()):
        if comp:
            d = p.diff_q(l)
            if d:
                out = out + comp * d
    return out


def field_bracket(x: LinearVectorField, y: LinearVectorField, p: Poly) -> Poly:
    """[X, Y] p = X(Y p) - Y(X p)."""
    return field_apply(x, field_apply(y, p)) - field_apply(y, field_apply(x, p))


def export_matrices(cs: CliffordSystem) -> dict:
    mats = {f"A{i}": [[int(v) for v in row] for row in cs.a(i)] for i in range(1, 8)}
    prods = {f"A{i}A{j}": [[int(v) for v in row] for row in cs.product(i, j)] for i, j in PAIRS}
    return {"convention": "R^8 = H x H, quaternion order (1, i, j, k)", "matrices": mats, "products": prods}
