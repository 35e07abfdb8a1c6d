"""Polynomial-coefficient differential operators on R^8 and the commuting families."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

from .clifford import CliffordSystem, build_clifford_system
from .exact.poly import NQ, Poly, q_vars
from .integrals import build_integrals
from .liealg import SkewMat, build_chain

Alpha = tuple  # eight nonnegative derivative orders

ZERO_ALPHA: Alpha = (0,) * NQ


def _unit(l: int) -> Alpha:
    return tuple(1 if n == l else 0 for n in range(NQ))


def _add_alpha(a: Alpha, b: Alpha) -> Alpha:
    return tuple(x + y for x, y in zip(a, b))


def _sub_alpha(a: Alpha, b: Alpha) -> Alpha:
    return tuple(x - y for x, y in zip(a, b))


def _sub_indices(alpha: Alpha):
    """All gamma <= alpha componentwise, with the multinomial binom(alpha, gamma)."""
    ranges = [range(a + 1) for a in alpha]

    def rec(n, prefix, weight):
        if n == NQ:
            yield tuple(prefix), weight
            return
        for g in ranges[n]:
            prefix.append(g)
            yield from rec(n + 1, prefix, weight * comb(alpha[n], g))
            prefix.pop()

    yield from rec(0, [], 1)


def derivative(p: Poly, alpha: Alpha) -> Poly:
    for var, k in enumerate(alpha):
        for _ in range(k):
            if not p:
                return p
            p = p.diff_q(var)
    return p


class DiffOp:
    """sum_alpha c_alpha(q) d^alpha, kept with no zero coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Alpha, Poly] | None = None):
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != NQ or min(alpha) < 0:
                raise ValueError(f"bad multi-index {alpha}")
            if not isinstance(c, Poly):
                c = Poly.const(c)
            if not c.depends_only_on_q():
                raise ValueError("coefficients must be polynomials in q")
            if c:
                clean[alpha] = c
        self.terms = clean

    @classmethod
    def zero(cls) -> "DiffOp":
        return cls()

    @classmethod
    def multiplication(cls, c: Poly | int | Fraction) -> "DiffOp":
        return cls({ZERO_ALPHA: c if isinstance(c, Poly) else Poly.const(c)})

    @classmethod
    def partial(cls, l: int) -> "DiffOp":
        return cls({_unit(l): Poly.const(1)})

    @property
    def order(self) -> int:
        """-1 for the zero operator."""
        return max((sum(a) for a in self.terms), default=-1)

    @property
    def coefficient_degree(self) -> int:
        return max((c.degree for c in self.terms.values()), default=-1)

    def is_canonical_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DiffOp") -> "DiffOp":
        acc = dict(self.terms)
        for a, c in other.terms.items():
            acc[a] = acc[a] + c if a in acc else c
        return DiffOp(acc)

    def __neg__(self) -> "DiffOp":
        return DiffOp({a: -c for a, c in self.terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, k) -> "DiffOp":
        return DiffOp({a: c * k for a, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # mutable-looking container semantics; compare only

    def __call__(self, f: Poly) -> Poly:
        return self.apply(f)

    def apply(self, f: Poly) -> Poly:
        acc = Poly.zero()
        for alpha, c in self.terms.items():
            d = derivative(f, alpha)
            if d:
                acc = acc + c * d
        return acc

    def compose(self, other: "DiffOp") -> "DiffOp":
        """self o other, expanded with the Leibniz rule."""
        acc: dict[Alpha, Poly] = {}
        for alpha, c in self.terms.items():
            for beta, d in other.terms.items():
                for gamma, w in _sub_indices(alpha):
                    dd = derivative(d, gamma)
                    if not dd:
                        continue
                    key = _add_alpha(_sub_alpha(alpha, gamma), beta)
                    term = c * dd * w
                    acc[key] = acc[key] + term if key in acc else term
        return DiffOp(acc)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other)

    def principal_symbol(self) -> Poly:
        """sum over top-order alpha of c_alpha(q) xi^alpha (real convention d -> xi)."""
        top = self.order
        acc = Poly.zero()
        for alpha, c in self.terms.items():
            if sum(alpha) == top:
                acc = acc + c * Poly.monomial((0,) * NQ + tuple(alpha))
        return acc

    def __repr__(self) -> str:
        return f"DiffOp(order={self.order}, terms={len(self.terms)})"


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.compose(b) - b.compose(a)


def monomials_upto(degree: int) -> list[Poly]:
    out = []
    for d in range(degree + 1):
        for idx in combinations_with_replacement(range(NQ), d):
            e = [0] * NQ
            for i in idx:
                e[i] += 1
            out.append(Poly.monomial(e + [0] * NQ))
    return out


def zero_test(a: DiffOp, max_degree: int | None = None) -> tuple[bool, Poly | None]:
    """Apply ``a`` to every monomial of degree <= max(order, 3); first nonzero image is the witness.

    T(x^beta) = sum_{alpha <= beta} c_alpha d^alpha x^beta is triangular in |alpha|, so
    vanishing on monomials up to the order forces every c_alpha to vanish.
    """
    top = max(a.order, 3) if max_degree is None else max_degree
    if top < a.order:
        raise ValueError("max_degree below the operator order does not decide")
    for m in monomials_upto(top):
        if a.apply(m):
            return False, m
    return True, None


def is_zero_operator(a: DiffOp, max_degree: int | None = None) -> bool:
    return zero_test(a, max_degree)[0]


# ---- vector fields and sums of squares -----------------------------------------------

def _row_forms(m) -> list[Poly]:
    """(M q)_l as linear polynomials."""
    q = q_vars()
    out = []
    for l in range(NQ):
        acc = Poly.zero()
        for k in range(NQ):
            if m[l, k]:
                acc = acc + q[k] * m[l, k]
        out.append(acc)
    return out


def _matrix(e):
    return e.m if isinstance(e, SkewMat) else e


def vector_field_op(e) -> DiffOp:
    """X(E) = sum_l (E q)_l d_l."""
    rows = _row_forms(_matrix(e))
    return DiffOp({_unit(l): rows[l] for l in range(NQ)})


def field_square(e) -> DiffOp:
    """X(E)^2 = sum_{l,m} (Eq)_l (Eq)_m d_l d_m + sum_l (E^2 q)_l d_l."""
    m = _matrix(e)
    rows = _row_forms(m)
    rows2 = _row_forms(m.dot(m))
    acc: dict[Alpha, Poly] = {}
    for l in range(NQ):
        for k in range(NQ):
            if rows[l] and rows[k]:
                key = _add_alpha(_unit(l), _unit(k))
                t = rows[l] * rows[k]
                acc[key] = acc[key] + t if key in acc else t
        if rows2[l]:
            key = _unit(l)
            acc[key] = acc[key] + rows2[l] if key in acc else rows2[l]
    return DiffOp(acc)


def op_from_field_squares(generators: Iterable, weights: Sequence | None = None) -> DiffOp:
    gens = list(generators)
    ws = list(weights) if weights is not None else [1] * len(gens)
    acc = DiffOp.zero()
    for w, e in zip(ws, gens):
        sq = field_square(e)
        acc = acc + (sq if w == 1 else sq.scale(w))
    return acc


def commutator_test(a: DiffOp, b: DiffOp) -> tuple[bool, Poly | None]:
    """Canonical [a, b] fed to the monomial zero test."""
    return zero_test(commutator(a, b))


# ---- families and sublaplacians ------------------------------------------------------

FAMILY_CHAIN = {"g": "G", "h": "H", "k": "K"}
FAMILY_SUBLAPLACIAN = {"g": 5, "h": 4, "k": 6}


def family_operators(kind: str, cs: CliffordSystem | None = None) -> list[DiffOp]:
    """The seven operators sum_{E in level} X(E)^2 along the chain."""
    cs = cs or build_clifford_system()
    chain = build_chain(FAMILY_CHAIN[kind.lower()], cs)
    return [op_from_field_squares(chain.generators(l)) for l in range(1, 8)]


def sublaplacian_trivial(j: int, cs: CliffordSystem | None = None) -> DiffOp:
    """-sum_{i<=j} X(A_i)^2."""
    cs = cs or build_clifford_system()
    return op_from_field_squares([cs.a(i) for i in range(1, j + 1)]).scale(-1)


def sphere_laplacian(cs: CliffordSystem | None = None) -> DiffOp:
    return sublaplacian_trivial(7, cs)


def sublaplacian_qh(cs: CliffordSystem | None = None) -> DiffOp:
    """Sphere Laplacian plus the squares of the three vertical fields."""
    cs = cs or build_clifford_system()
    return sphere_laplacian(cs) + op_from_field_squares([cs.a(6), cs.a(7), cs.hopf_k])


@dataclass
class OpCheck:
    name: str
    ok: bool
    witness: Poly | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "ok": self.ok}
        if self.witness is not None:
            out["witness_monomial"] = str(self.witness)
        return out


@dataclass
class FamilyReport:
    family: str
    pair_checks: list[OpCheck]
    sublaplacian_checks: list[OpCheck]
    qh_checks: list[OpCheck]
    qh_identity_ok: bool | None
    symbol_checks: list[OpCheck]
    named_checks: list[OpCheck] = field(default_factory=list)
    negative_control: OpCheck | None = None

    @property
    def failures(self) -> list[OpCheck]:
        every = self.pair_checks + self.sublaplacian_checks + self.qh_checks + self.symbol_checks + self.named_checks
        return [c for c in every if not c.ok]

    @property
    def sublaplacian_ok(self) -> bool:
        return all(c.ok for c in self.sublaplacian_checks + self.qh_checks)

    @property
    def symbols_match(self) -> bool:
        return all(c.ok for c in self.symbol_checks)

    @property
    def ok(self) -> bool:
        neg = self.negative_control is None or self.negative_control.ok
        return not self.failures and self.qh_identity_ok is not False and neg

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "pairs_checked": len(self.pair_checks),
            "pairs_zero": sum(c.ok for c in self.pair_checks),
            "failures": [c.to_json() for c in self.failures],
            "sublaplacian_ok": self.sublaplacian_ok,
            "sublaplacian_checks": [c.to_json() for c in self.sublaplacian_checks + self.qh_checks],
            "qh_identity_ok": self.qh_identity_ok,
            "symbols_match": self.symbols_match,
            "symbol_convention": "principal symbol with d -> xi equals 2 I_l; with d -> i xi it equals -2 I_l",
            "named_checks": [c.to_json() for c in self.named_checks],
            "negative_control": self.negative_control.to_json() if self.negative_control else None,
            "decision_monomials": len(monomials_upto(3)),
        }


def qh_identity(cs: CliffordSystem | None = None) -> bool:
    """Delta_QH == Delta_T5 + X(A6A7)^2 as canonical DiffOps."""
    cs = cs or build_clifford_system()
    return sublaplacian_qh(cs) == sublaplacian_trivial(5, cs) + field_square(cs.hopf_k)


def negative_control(cs: CliffordSystem | None = None) -> OpCheck:
    """[X(A1)^2, X(A1A2)] must be nonzero; ok means the test detects it."""
    cs = cs or build_clifford_system()
    c = commutator(field_square(cs.a(1)), vector_field_op(cs.product(1, 2)))
    zero, witness = zero_test(c)
    return OpCheck("[X(A1)^2, X(A1A2)] nonzero", not zero, witness)


def _h_named_checks(cs: CliffordSystem) -> list[OpCheck]:
    """Identities behind the H-family argument, each decided separately."""
    x = lambda i, j: vector_field_op(cs.product(i, j))  # noqa: E731
    sq = lambda *idx: op_from_field_squares([cs.product(*i) for i in idx])  # noqa: E731
    checks = []

    def run(name, a, b):
        ok, w = commutator_test(a, b)
        checks.append(OpCheck(name, ok, w))

    run("[X(A5A7)^2 + X(A6A7)^2, X(A5A6)]", sq((5, 7), (6, 7)), x(5, 6))
    for l, r in combinations(range(1, 5), 2):
        run(f"[X(A{l}A{r}), sum_j X(A{l}Aj)^2 + X(A{r}Aj)^2, j=5..7]",
            x(l, r), sq(*[(l, j) for j in range(5, 8)], *[(r, j) for j in range(5, 8)]))
    for m, n in combinations(range(5, 8), 2):
        run(f"[X(A{m}A{n}), sum_i X(AiA{m})^2 + X(AiA{n})^2, i=1..4]",
            x(m, n), sq(*[(i, m) for i in range(1, 5)], *[(i, n) for i in range(1, 5)]))
    low = op_from_field_squares([cs.a(k) for k in range(1, 5)])
    high = op_from_field_squares([cs.a(k) for k in range(5, 8)])
    run("[sum_{k=5..7} X(Ak)^2, sum_{k<=4} X(Ak)^2]", high, low)
    for i, j in list(combinations(range(1, 5), 2)) + list(combinations(range(5, 8), 2)):
        run(f"[X(A{i}A{j}), sum_{{k<=4}} X(Ak)^2]", x(i, j), low)
    return checks


def verify_family(kind: str, cs: CliffordSystem | None = None, include_named: bool = True) -> FamilyReport:
    cs = cs or build_clifford_system()
    kind = kind.lower()
    if kind not in FAMILY_CHAIN:
        raise ValueError(f"unknown family {kind!r}")
    ops = family_operators(kind, cs)
    pairs = []
    for a, b in combinations(range(7), 2):
        ok, w = commutator_test(ops[a], ops[b])
        pairs.append(OpCheck(f"[{kind.upper()}{a + 1}, {kind.upper()}{b + 1}]", ok, w))
    j = FAMILY_SUBLAPLACIAN[kind]
    lap = sublaplacian_trivial(j, cs)
    subs = []
    for n, act in enumerate(ops, 1):
        ok, w = commutator_test(act, lap)
        subs.append(OpCheck(f"[{kind.upper()}{n}, Delta_T{j}]", ok, w))
    qh_checks, qh_ok = [], None
    if kind == "g":
        qh = sublaplacian_qh(cs)
        for n, act in enumerate(ops, 1):
            ok, w = commutator_test(act, qh)
            qh_checks.append(OpCheck(f"[G{n}, Delta_QH]", ok, w))
        qh_ok = qh_identity(cs)
    iset = build_integrals(build_chain(FAMILY_CHAIN[kind], cs))
    symbols = []
    for n, op in enumerate(ops, 1):
        target = iset.integral(n) * 2
        sym = op.principal_symbol()
        symbols.append(OpCheck(f"symbol({kind.upper()}{n}) = 2 I{n}", sym == target and (-sym) == -target))
    named = _h_named_checks(cs) if (kind == "h" and include_named) else []
    return FamilyReport(kind, pairs, subs, qh_checks, qh_ok, symbols, named, negative_control(cs))


def lie_bracket_rule_holds(a: SkewMat, b: SkewMat) -> bool:
    """[X(A), X(B)] == -X([A, B]) as canonical DiffOps."""
    lhs = commutator(vector_field_op(a), vector_field_op(b))
    rhs = vector_field_op(SkewMat(a.m.dot(b.m) - b.m.dot(a.m), check=False)).scale(-1)
    return lhs == rhs


__all__ = [
    "DiffOp",
    "FamilyReport",
    "OpCheck",
    "commutator",
    "commutator_test",
    "family_operators",
    "field_square",
    "is_zero_operator",
    "lie_bracket_rule_holds",
    "monomials_upto",
    "negative_control",
    "op_from_field_squares",
    "qh_identity",
    "sphere_laplacian",
    "sublaplacian_qh",
    "sublaplacian_trivial",
    "vector_field_op",
    "verify_family",
    "zero_test",
]
