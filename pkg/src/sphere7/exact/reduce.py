"""Multivariate division in graded lexicographic order."""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Sequence

from .poly import Poly, grlex_key, mono_divides

GRLEX = "grlex"


def reduce_modulo(p: Poly, divisors: Sequence[Poly], order: str = GRLEX) -> tuple[list[Poly], Poly]:
    """Divide ``p`` by ``divisors``; returns (quotients, remainder).

    ``p == sum(q_i * d_i) + remainder`` and no remainder monomial is divisible
    by a divisor leading monomial.  A zero remainder proves ideal membership;
    a nonzero remainder with several divisors proves nothing by itself.
    """
    if order != GRLEX:
        raise ValueError(f"unsupported monomial order {order!r}")
    if any(d.is_zero() for d in divisors):
        raise ValueError("divisors must be nonzero")
    leads = []
    for d in divisors:
        lm, lc = d.leading_term()
        # tail terms stored as (key, coeff) for subtraction
        tail = [(k, c) for k, c in d.terms.items() if k != lm]
        leads.append((lm, Fraction(lc), tail))

    work: dict[int, object] = dict(p.terms)
    heap = [(-grlex_key(k)[0], -k) for k in work]
    heapq.heapify(heap)
    quotients: list[dict[int, object]] = [{} for _ in divisors]
    remainder: dict[int, object] = {}

    while heap:
        _, negk = heapq.heappop(heap)
        k = -negk
        c = work.pop(k, 0)
        if c == 0:
            continue
        for idx, (lm, lc, tail) in enumerate(leads):
            if mono_divides(lm, k):
                shift = k - lm
                factor = c / lc
                if isinstance(factor, Fraction) and factor.denominator == 1:
                    factor = factor.numerator
                quotients[idx][shift] = quotients[idx].get(shift, 0) + factor
                for tk, tc in tail:
                    nk = tk + shift
                    old = work.get(nk)
                    nv = (0 if old is None else old) - factor * tc
                    if old is None:
                        # tail monomials sort below k, so they are still pending
                        heapq.heappush(heap, (-grlex_key(nk)[0], -nk))
                    work[nk] = nv
                break
        else:
            remainder[k] = c
    return [Poly(q) for q in quotients], Poly(remainder)


def divides_exactly(p: Poly, d: Poly) -> bool:
    """Single-divisor membership test: True iff d divides p."""
    _, r = reduce_modulo(p, [d])
    return r.is_zero()
