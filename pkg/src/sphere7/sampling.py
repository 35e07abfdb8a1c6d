"""Exact rational points on the sphere and on its tangent bundle.

Points on the unit sphere come from inverse stereographic projection of
integer vectors, so |q|^2 = 1 holds exactly.  Coordinates are kept as
integer numerators over a shared denominator so that polynomial evaluation
runs on Python ints.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .exact.poly import NQ, Poly, unpack


@dataclass(frozen=True)
class ScaledPoint:
    """Phase point (q, xi) = (q_num / q_den, xi_num / xi_den) with integer data."""

    q_num: tuple[int, ...]
    q_den: int
    xi_num: tuple[int, ...]
    xi_den: int

    @property
    def q(self) -> list[Fraction]:
        return [Fraction(a, self.q_den) for a in self.q_num]

    @property
    def xi(self) -> list[Fraction]:
        return [Fraction(a, self.xi_den) for a in self.xi_num]

    def coords(self) -> list[Fraction]:
        return self.q + self.xi

    def as_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.coords()])

    def pairing(self) -> Fraction:
        return sum((a * b for a, b in zip(self.q, self.xi)), Fraction(0))

    def sphere_defect(self) -> Fraction:
        return sum((a * a for a in self.q), Fraction(0)) - 1


def sphere_point_from(u: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Inverse stereographic image of an integer 7-vector, as (numerators, denominator)."""
    if len(u) != NQ - 1:
        raise ValueError("need 7 integers")
    n2 = sum(x * x for x in u)
    num = tuple(2 * x for x in u) + (n2 - 1,)
    den = n2 + 1
    g = gcd(den, *num)
    return tuple(a // g for a in num), den // g


def random_sphere_point(rng: random.Random, bound: int = 12) -> tuple[tuple[int, ...], int]:
    u = [rng.randint(-bound, bound) for _ in range(NQ - 1)]
    return sphere_point_from(u)


def tangent_projection(q_num: Sequence[int], q_den: int, v: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """xi = v - <v,q> q for unit q = q_num/q_den, returned as (numerators, denominator)."""
    vq = sum(a * b for a, b in zip(v, q_num))
    d2 = q_den * q_den
    num = tuple(d2 * a - vq * b for a, b in zip(v, q_num))
    g = gcd(d2, *num)
    return tuple(a // g for a in num), d2 // g


def random_phase_point(rng: random.Random, bound: int = 12, xi_bound: int = 9) -> ScaledPoint:
    """Random exact point of the constraint variety {|q|^2 = 1, <q,xi> = 0}."""
    qn, qd = random_sphere_point(rng, bound)
    v = [rng.randint(-xi_bound, xi_bound) for _ in range(NQ)]
    xn, xd = tangent_projection(qn, qd, v)
    return ScaledPoint(qn, qd, xn, xd)


def phase_points(seed: int, count: int, bound: int = 12) -> list[ScaledPoint]:
    rng = random.Random(seed)
    return [random_phase_point(rng, bound) for _ in range(count)]


def random_float_phase_point(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Float point on the unit tangent bundle, |xi| = 1."""
    q = rng.standard_normal(NQ)
    q /= np.linalg.norm(q)
    v = rng.standard_normal(NQ)
    xi = v - (v @ q) * q
    xi /= np.linalg.norm(xi)
    return q, xi


class ExactEvaluator:
    """Evaluates a fixed polynomial at many ScaledPoints using integer arithmetic."""

    def __init__(self, poly: Poly):
        den = 1
        for c in poly.terms.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // gcd(den, c.denominator)
        self.scale = den
        self.terms = []
        for k, c in poly.terms.items():
            e = unpack(k)
            self.terms.append((int(c * den), e[:NQ], e[NQ:], sum(e[:NQ]), sum(e[NQ:])))
        self.max_q = max((t[3] for t in self.terms), default=0)
        self.max_xi = max((t[4] for t in self.terms), default=0)

    def numerator(self, pt: ScaledPoint) -> int:
        """Integer N with poly(pt) = N / (scale * q_den^max_q * xi_den^max_xi)."""
        qpow = [[1] * (self.max_q + 1) for _ in range(NQ)]
        xpow = [[1] * (self.max_xi + 1) for _ in range(NQ)]
        for i in range(NQ):
            for d in range(1, self.max_q + 1):
                qpow[i][d] = qpow[i][d - 1] * pt.q_num[i]
            for d in range(1, self.max_xi + 1):
                xpow[i][d] = xpow[i][d - 1] * pt.xi_num[i]
        qden_pow = [pt.q_den ** (self.max_q - d) for d in range(self.max_q + 1)]
        xden_pow = [pt.xi_den ** (self.max_xi - d) for d in range(self.max_xi + 1)]
        total = 0
        for c, eq, ex, dq, dx in self.terms:
            v = c * qden_pow[dq] * xden_pow[dx]
            for i in range(NQ):
                a = eq[i]
                if a:
                    v *= qpow[i][a]
                b = ex[i]
                if b:
                    v *= xpow[i][b]
            total += v
        return total

    def value(self, pt: ScaledPoint) -> Fraction:
        n = self.numerator(pt)
        return Fraction(n, self.scale * pt.q_den ** self.max_q * pt.xi_den ** self.max_xi)

    def is_zero_at(self, pt: ScaledPoint) -> bool:
        return self.numerator(pt) == 0
