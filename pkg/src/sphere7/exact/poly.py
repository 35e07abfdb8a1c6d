"""Sparse polynomials with exact rational coefficients in (q1..q8, xi1..xi8).

Monomials are packed into a single Python int, one byte per variable, with
q1 in the most significant byte.  Under this packing, comparing two packed
monomials of equal total degree as integers is exactly lexicographic
comparison with q1 > q2 > ... > q8 > xi1 > ... > xi8, so the graded
lexicographic order is the key ``(degree, packed)``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

NVARS = 16
NQ = 8
_BITS = 8
_MAXEXP = (1 << _BITS) - 1
_NBYTES = NVARS

VAR_NAMES = tuple([f"q{i}" for i in range(1, 9)] + [f"xi{i}" for i in range(1, 9)])


def _shift(var: int) -> int:
    return _BITS * (NVARS - 1 - var)


def pack(exponents: Sequence[int]) -> int:
    if len(exponents) != NVARS:
        raise ValueError(f"expected {NVARS} exponents, got {len(exponents)}")
    if any(e < 0 or e > _MAXEXP for e in exponents):
        raise ValueError(f"exponents must lie in 0..{_MAXEXP}")
    return int.from_bytes(bytes(exponents), "big")


def unpack(key: int) -> tuple[int, ...]:
    return tuple(key.to_bytes(_NBYTES, "big"))


def mono_degree(key: int) -> int:
    return sum(key.to_bytes(_NBYTES, "big"))


def mono_divides(a: int, b: int) -> bool:
    """True when monomial ``a`` divides monomial ``b``."""
    return all(x <= y for x, y in zip(a.to_bytes(_NBYTES, "big"), b.to_bytes(_NBYTES, "big")))


def grlex_key(key: int) -> tuple[int, int]:
    return (mono_degree(key), key)


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _check_scalar(c) -> None:
    if not isinstance(c, Rational):
        raise TypeError(f"exact polynomials take rational coefficients, got {type(c).__name__}")


class Poly:
    """Immutable sparse polynomial over the rationals in 16 variables.

    Coefficients are Python ``int`` or ``Fraction``; zero coefficients are
    never stored, so two equal polynomials have equal term dictionaries.
    """

    __slots__ = ("_terms", "_degree")

    def __init__(self, terms: Mapping[int, Rational] | None = None):
        clean: dict[int, Rational] = {}
        if terms:
            for k, c in terms.items():
                _check_scalar(c)
                if c != 0:
                    clean[k] = _normalize(c)
        self._terms = clean
        self._degree: int | None = None

    @classmethod
    def _raw(cls, terms: dict[int, Rational]) -> "Poly":
        # caller guarantees no zeros and normalized coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._degree = None
        return p

    @classmethod
    def _from_accum(cls, acc: dict[int, Rational]) -> "Poly":
        return cls._raw({k: _normalize(c) for k, c in acc.items() if c != 0})

    # ---- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "Poly":
        return cls._raw({})

    @classmethod
    def const(cls, c: Rational) -> "Poly":
        _check_scalar(c)
        return cls._raw({0: _normalize(c)} if c != 0 else {})

    @classmethod
    def var(cls, index: int) -> "Poly":
        if not 0 <= index < NVARS:
            raise IndexError(index)
        return cls._raw({1 << _shift(index): 1})

    @classmethod
    def q(cls, i: int) -> "Poly":
        """The coordinate q_{i+1} (0-based index)."""
        return cls.var(i)

    @classmethod
    def xi(cls, i: int) -> "Poly":
        """The momentum coordinate xi_{i+1} (0-based index)."""
        return cls.var(NQ + i)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: Rational = 1) -> "Poly":
        return cls({pack(exponents): coeff})

    @classmethod
    def from_exponents(cls, items: Iterable[tuple[Sequence[int], Rational]]) -> "Poly":
        acc: dict[int, Rational] = {}
        for exps, c in items:
            k = pack(exps)
            acc[k] = acc.get(k, 0) + c
        return cls(acc)

    # ---- inspection ---------------------------------------------------
    @property
    def terms(self) -> Mapping[int, Rational]:
        return self._terms

    def items(self) -> Iterator[tuple[tuple[int, ...], Rational]]:
        """(exponent tuple, coefficient) pairs in graded-lex descending order."""
        for k in sorted(self._terms, key=grlex_key, reverse=True):
            yield unpack(k), self._terms[k]

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._degree is None:
            self._degree = max((mono_degree(k) for k in self._terms), default=-1)
        return self._degree

    def degree_in(self, variables: Iterable[int]) -> int:
        vs = list(variables)
        return max((sum(unpack(k)[v] for v in vs) for k in self._terms), default=-1)

    def variables(self) -> set[int]:
        out: set[int] = set()
        for k in self._terms:
            out.update(i for i, e in enumerate(unpack(k)) if e)
        return out

    def depends_only_on_q(self) -> bool:
        return all(k & ((1 << (_BITS * NQ)) - 1) == 0 for k in self._terms)

    def leading_term(self) -> tuple[int, Rational]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        k = max(self._terms, key=grlex_key)
        return k, self._terms[k]

    def coefficient(self, exponents: Sequence[int]) -> Rational:
        return self._terms.get(pack(exponents), 0)

    # ---- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, Rational):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        acc = dict(big)
        for k, c in small.items():
            v = acc.get(k, 0) + c
            if v == 0:
                acc.pop(k, None)
            else:
                acc[k] = _normalize(v)
        return Poly._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c: Rational) -> "Poly":
        _check_scalar(c)
        if c == 0:
            return Poly.zero()
        return Poly._raw({k: _normalize(v * c) for k, v in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Rational):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self._terms or not other._terms:
            return Poly.zero()
        if self.degree + other.degree > _MAXEXP:
            raise OverflowError("total degree exceeds packed exponent range")
        acc: dict[int, Rational] = {}
        get = acc.get
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                k = ka + kb
                acc[k] = get(k, 0) + ca * cb
        return Poly._from_accum(acc)

    def __rmul__(self, other) -> "Poly":
        if isinstance(other, Rational):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other) -> "Poly":
        if not isinstance(other, Rational):
            return NotImplemented
        return self.scale(Fraction(1) / Fraction(other))

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Rational):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # ---- calculus -----------------------------------------------------
    def diff(self, var: int) -> "Poly":
        """Formal partial derivative with respect to variable ``var`` (0..15)."""
        if not 0 <= var < NVARS:
            raise IndexError(var)
        sh = _shift(var)
        unit = 1 << sh
        out: dict[int, Rational] = {}
        for k, c in self._terms.items():
            e = (k >> sh) & _MAXEXP
            if e:
                out[k - unit] = c * e
        return Poly._raw(out)

    def diff_q(self, i: int) -> "Poly":
        return self.diff(i)

    def diff_xi(self, i: int) -> "Poly":
        return self.diff(NQ + i)

    def substitute_sign(self, sign_xi: int) -> "Poly":
        """Replace xi by ``sign_xi * xi``."""
        if sign_xi == 1:
            return self
        out = {}
        for k, c in self._terms.items():
            dxi = sum(unpack(k)[NQ:])
            out[k] = -c if dxi % 2 else c
        return Poly._raw(out)

    def part_by_q_degree(self) -> dict[int, "Poly"]:
        """Split into pieces homogeneous in q, keyed by their q-degree."""
        parts: dict[int, dict[int, Rational]] = {}
        for k, c in self._terms.items():
            d = sum(unpack(k)[:NQ])
            parts.setdefault(d, {})[k] = c
        return {d: Poly._raw(t) for d, t in parts.items()}

    # ---- evaluation ---------------------------------------------------
    def __call__(self, point: Sequence) -> Rational | float:
        return self.evaluate(point)

    def evaluate(self, point: Sequence) -> Rational | float:
        """Evaluate at a 16-vector (q, xi).  Exact for rational input."""
        if len(point) != NVARS:
            raise ValueError(f"point must have {NVARS} coordinates")
        cache: dict[tuple[int, int], object] = {}
        total = 0
        for k, c in self._terms.items():
            term = c
            for v, e in enumerate(unpack(k)):
                if e:
                    key = (v, e)
                    pw = cache.get(key)
                    if pw is None:
                        pw = point[v] ** e
                        cache[key] = pw
                    term = term * pw
            total = total + term
        return _normalize(total) if isinstance(total, Fraction) else total

    def evaluate_qxi(self, q: Sequence, xi: Sequence) -> Rational | float:
        return self.evaluate(list(q) + list(xi))

    # ---- floating mirror ----------------------------------------------
    def to_float(self) -> "FloatPoly":
        return FloatPoly(self)

    # ---- display ------------------------------------------------------
    def __repr__(self) -> str:
        if not self._terms:
            return "Poly(0)"
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                VAR_NAMES[v] if e == 1 else f"{VAR_NAMES[v]}^{e}" for v, e in enumerate(exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list[list]:
        """List of [exponent list, coefficient string] pairs in grlex order."""
        return [[list(exps), str(c)] for exps, c in self.items()]


class FloatPoly:
    """Binary64 mirror of a :class:`Poly`, vectorized over point batches.

    Conversion is one way: nothing here feeds back into exact code paths.
    """

    def __init__(self, poly: Poly):
        items = list(poly.terms.items())
        self.exponents = np.array([unpack(k) for k, _ in items], dtype=np.int64).reshape(-1, NVARS)
        self.coeffs = np.array([float(c) for _, c in items], dtype=np.float64)
        self._grad: list[FloatPoly] | None = None
        self._poly = poly

    def __call__(self, points: np.ndarray) -> np.ndarray | float:
        x = np.asarray(points, dtype=np.float64)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if self.coeffs.size == 0:
            out = np.zeros(x.shape[0])
        else:
            # (npts, nterms) product of powers
            powers = np.prod(x[:, None, :] ** self.exponents[None, :, :], axis=2)
            out = powers @ self.coeffs
        return float(out[0]) if single else out

    def gradient(self, points: np.ndarray) -> np.ndarray:
        if self._grad is None:
            self._grad = [FloatPoly(self._poly.diff(v)) for v in range(NVARS)]
        x = np.asarray(points, dtype=np.float64)
        single = x.ndim == 1
        g = np.stack([np.atleast_1d(gp(np.atleast_2d(x))) for gp in self._grad], axis=-1)
        return g[0] if single else g


def inner(u: Sequence[Poly], v: Sequence[Poly]) -> Poly:
    acc = Poly.zero()
    for a, b in zip(u, v):
        acc = acc + a * b
    return acc


def q_vars() -> list[Poly]:
    return [Poly.q(i) for i in range(NQ)]


def xi_vars() -> list[Poly]:
    return [Poly.xi(i) for i in range(NQ)]


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(p: Poly, var: int) -> Poly:
    return p.diff(var)
