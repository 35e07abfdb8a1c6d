from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere7.exact import (
    Poly,
    RatMatrix,
    divides_exactly,
    pack,
    rank_nullspace,
    reduce_modulo,
    solve_in_span,
    unpack,
)
from sphere7.exact.poly import inner, q_vars, xi_vars
from sphere7.sampling import ExactEvaluator, phase_points, sphere_point_from

small = st.integers(min_value=-4, max_value=4)
exps = st.lists(st.integers(min_value=0, max_value=2), min_size=16, max_size=16)


@st.composite
def polys(draw, max_terms=5):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    items = [(draw(exps), draw(small)) for _ in range(n)]
    return Poly.from_exponents(items)


def test_pack_roundtrip():
    e = (1, 0, 3, 0, 0, 0, 0, 2, 0, 1, 0, 0, 0, 0, 0, 4)
    assert unpack(pack(e)) == e


def test_zero_coefficients_dropped():
    p = Poly.q(0) - Poly.q(0)
    assert p.is_zero() and len(p) == 0


def test_fraction_coefficients_normalize():
    p = Poly.q(1) * Fraction(4, 2)
    (c,) = p.terms.values()
    assert c == 2 and type(c) is int


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly.zero()


@given(polys(), polys(), st.integers(min_value=0, max_value=15))
@settings(max_examples=60, deadline=None)
def test_leibniz_rule(a, b, var):
    assert (a * b).diff(var) == a.diff(var) * b + a * b.diff(var)


@given(polys(), st.lists(small, min_size=16, max_size=16))
@settings(max_examples=40, deadline=None)
def test_exact_and_float_evaluation_agree(p, x):
    exact = p.evaluate([Fraction(v) for v in x])
    flt = p.to_float()(np.array([x], dtype=float))[0]
    assert abs(float(exact) - flt) <= 1e-9 * max(1.0, abs(float(exact)))


def test_gradient_of_quadratic():
    q, xi = q_vars(), xi_vars()
    f = inner(q, xi)  # <q, xi>
    fp = f.to_float()
    pt = np.arange(16, dtype=float)[None, :]
    g = fp.gradient(pt)[0]
    assert np.allclose(g[:8], pt[0, 8:]) and np.allclose(g[8:], pt[0, :8])


def test_rank_nullspace_small():
    m = RatMatrix.from_rows([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    rank, null = rank_nullspace(m)
    assert rank == 2
    assert len(null) == 1
    assert m.matvec(null[0]) == [0, 0, 0]


@given(st.lists(st.lists(small, min_size=5, max_size=5), min_size=1, max_size=6))
@settings(max_examples=80, deadline=None)
def test_rank_matches_numpy_and_nullspace_is_kernel(rows):
    m = RatMatrix.from_rows(rows)
    rank, null = rank_nullspace(m)
    assert rank == np.linalg.matrix_rank(np.array(rows, dtype=float))
    assert rank + len(null) == 5
    for v in null:
        assert all(x == 0 for x in m.matvec(v))


def test_rank_with_fractions():
    m = RatMatrix.from_rows([[Fraction(1, 3), Fraction(1, 2)], [Fraction(2, 3), Fraction(1)]])
    assert rank_nullspace(m)[0] == 1


def test_solve_in_span():
    basis = [[1, 0, 1], [0, 1, 1]]
    assert solve_in_span(basis, [2, 3, 5]) == [2, 3]
    assert solve_in_span(basis, [1, 1, 0]) is None


def test_reduce_by_pairing_exact_multiple():
    q, xi = q_vars(), xi_vars()
    pairing = inner(q, xi)
    p = pairing * (q[0] * xi[3] + Poly.const(2))
    assert divides_exactly(p, pairing)
    assert not divides_exactly(p + q[1], pairing)


@given(polys(max_terms=4))
@settings(max_examples=40, deadline=None)
def test_division_identity(p):
    q, xi = q_vars(), xi_vars()
    divisors = [inner(q, xi), inner(q, q) - Poly.const(1)]
    quots, rem = reduce_modulo(p, divisors)
    assert sum((a * d for a, d in zip(quots, divisors)), Poly.zero()) + rem == p


def test_sphere_points_are_exact():
    num, den = sphere_point_from((1, 2, 0, -1, 3, 0, 1))
    assert sum(x * x for x in num) == den * den


def test_phase_points_on_variety_and_evaluator():
    pts = phase_points(3, 20)
    q, xi = q_vars(), xi_vars()
    ev = ExactEvaluator(inner(q, xi))
    ev2 = ExactEvaluator(inner(q, q))
    for pt in pts:
        assert pt.pairing() == 0 and pt.sphere_defect() == 0
        assert ev.value(pt) == 0 and ev2.value(pt) == 1


def test_evaluator_matches_poly_evaluate():
    p = q_vars()[0] * xi_vars()[2] * 3 + q_vars()[5] ** 2
    for pt in phase_points(5, 10):
        assert ExactEvaluator(p).value(pt) == p.evaluate(pt.coords())


def test_rejects_bad_matrix():
    with pytest.raises(ValueError):
        RatMatrix.from_rows([[1, 2], [3]])
