"""Exact dense matrices over the rationals: rank and nullspace by Bareiss elimination."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Sequence


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class RatMatrix:
    """Row-major rational matrix; entries are ints or Fractions."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")
        for e in self.entries:
            if not isinstance(e, Rational):
                raise TypeError(f"non-rational entry {e!r}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rational]], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(_norm(Fraction(e)) if isinstance(e, Fraction) else e for r in rows for e in r))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.entries[i * self.cols + j]

    def matvec(self, v: Sequence[Rational]) -> list:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return [_norm(sum((a * b for a, b in zip(self.row(i), v)), Fraction(0))) for i in range(self.rows)]

    def permute_rows(self, perm: Sequence[int]) -> "RatMatrix":
        return RatMatrix.from_rows([self.row(p) for p in perm], self.cols)

    def permute_cols(self, perm: Sequence[int]) -> "RatMatrix":
        return RatMatrix.from_rows([[r[p] for p in perm] for r in self.to_rows()], self.cols)

    def scale_row(self, i: int, c: Rational) -> "RatMatrix":
        rows = self.to_rows()
        rows[i] = [e * c for e in rows[i]]
        return RatMatrix.from_rows(rows, self.cols)

    def rank(self) -> int:
        return rank_nullspace(self)[0]

    def nullspace(self) -> list[list]:
        return rank_nullspace(self)[1]


def _integer_rows(m: RatMatrix) -> list[list[int]]:
    out = []
    for r in m.to_rows():
        den = 1
        for e in r:
            if isinstance(e, Fraction):
                den = lcm(den, e.denominator)
        out.append([int(e * den) for e in r])
    return out


def echelon_bareiss(rows: list[list[int]], cols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the nonzero echelon rows and their pivot columns.  Every update
    divides by the previous pivot; the division is asserted to be exact.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        prow = m[r]
        for i in range(r + 1, nrows):
            row = m[i]
            f = row[c]
            for j in range(c + 1, cols):
                num = row[j] * piv - f * prow[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("Bareiss division was not exact")
                row[j] = q
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _primitive(v: list[Fraction]) -> list[int]:
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    # first nonzero entry positive
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints


def rank_nullspace(m: RatMatrix) -> tuple[int, list[list[int]]]:
    """Exact rank and a nullspace basis of primitive integer vectors."""
    rows = _integer_rows(m)
    ech, pivots = echelon_bareiss(rows, m.cols)
    rank = len(pivots)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        x = [Fraction(0)] * m.cols
        x[free] = Fraction(1)
        for i in range(rank - 1, -1, -1):
            pc = pivots[i]
            row = ech[i]
            s = sum((row[j] * x[j] for j in range(pc + 1, m.cols) if row[j] and x[j]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(_primitive(x))
    return rank, basis


def rank_of(rows: Iterable[Sequence[Rational]], cols: int) -> int:
    return rank_nullspace(RatMatrix.from_rows(list(rows), cols))[0]


def solve_in_span(basis: Sequence[Sequence[Rational]], target: Sequence[Rational]) -> list[Fraction] | None:
    """Coefficients c with sum c_i basis_i == target, or None if target is outside the span."""
    n = len(basis)
    if n == 0:
        return [] if all(t == 0 for t in target) else None
    dim = len(target)
    # columns are basis vectors; augment with target
    aug = RatMatrix.from_rows([[basis[i][k] for i in range(n)] + [-target[k]] for k in range(dim)], n + 1)
    _, null = rank_nullspace(aug)
    for v in null:
        if v[n] != 0:
            return [Fraction(v[i], v[n]) for i in range(n)]
    return None
