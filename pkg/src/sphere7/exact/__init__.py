"""Exact arithmetic layer: rationals, sparse polynomials, dense linear algebra, division."""

from __future__ import annotations

from fractions import Fraction as Rational

from .linalg import RatMatrix, echelon_bareiss, rank_nullspace, rank_of, solve_in_span
from .poly import (
    NQ,
    NVARS,
    VAR_NAMES,
    FloatPoly,
    Poly,
    grlex_key,
    inner,
    pack,
    partial_derivative,
    poly_arith,
    q_vars,
    unpack,
    xi_vars,
)
from .reduce import GRLEX, divides_exactly, reduce_modulo

__all__ = [
    "GRLEX",
    "NQ",
    "NVARS",
    "VAR_NAMES",
    "FloatPoly",
    "Poly",
    "RatMatrix",
    "Rational",
    "divides_exactly",
    "echelon_bareiss",
    "grlex_key",
    "inner",
    "pack",
    "partial_derivative",
    "poly_arith",
    "q_vars",
    "rank_nullspace",
    "rank_of",
    "reduce_modulo",
    "solve_in_span",
    "unpack",
    "xi_vars",
]
