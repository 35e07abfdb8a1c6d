from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from sphere7.clifford import (
    LinearVectorField,
    build_clifford_system,
    export_matrices,
    field_apply,
    field_bracket,
    form_b,
    trace,
    verify_orthonormal_basis,
)
from sphere7.exact.poly import Poly, inner, q_vars
from sphere7.operators import monomials_upto

# hand-written left multiplications on H in the basis (1, i, j, k)
L_I = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
L_J = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
L_K = [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
B3 = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]


def blocks(a, b, c, d):
    return np.block([[np.array(a), np.array(b)], [np.array(c), np.array(d)]])


Z = np.zeros((4, 4), dtype=int)
I4 = np.eye(4, dtype=int)


def as_int(m):
    return np.array(m, dtype=int)


def test_displayed_blocks_match(cs):
    assert (as_int(cs.a(3)) == blocks(Z, B3, B3, Z)).all()
    assert (as_int(cs.a(4)) == blocks(Z, I4, -I4, Z)).all()
    for n, lm in zip((5, 6, 7), (L_I, L_J, L_K)):
        assert (as_int(cs.a(n)) == blocks(lm, Z, Z, -np.array(lm))).all()


def test_a4_entry_convention(cs):
    assert cs.a(4)[0, 4] == 1 and cs.a(4)[4, 0] == -1


def test_clifford_relations_exact(cs):
    eye = np.eye(8, dtype=int)
    for i in range(1, 8):
        assert (as_int(cs.a(i)).T == -as_int(cs.a(i))).all()
        for j in range(1, 8):
            anti = cs.a(i).dot(cs.a(j)) + cs.a(j).dot(cs.a(i))
            assert (as_int(anti) == (-2 * eye if i == j else 0 * eye)).all()


def test_a5_squared_and_a1a2_anticommute(cs):
    assert (as_int(cs.a(5).dot(cs.a(5))) == -np.eye(8, dtype=int)).all()
    assert not (cs.a(1).dot(cs.a(2)) + cs.a(2).dot(cs.a(1))).any()


def test_products_square_to_minus_identity(cs):
    for i, j in combinations(range(1, 8), 2):
        p = cs.product(i, j)
        assert (as_int(p.dot(p)) == -np.eye(8, dtype=int)).all()
        assert (as_int(p).T == -as_int(p)).all()


def test_quartic_products_symmetric_traceless(cs):
    for idx in combinations(range(1, 8), 4):
        p = cs.product(*idx)
        assert (as_int(p).T == as_int(p)).all()
        assert trace(p) == 0


def test_trace_form_values(cs):
    assert form_b(cs.a(1), cs.a(1)) == 8
    assert form_b(cs.a(1), cs.a(2)) == 0
    assert trace(cs.product(1, 2, 3, 4)) == 0


def test_orthonormal_basis_report(cs):
    rep = verify_orthonormal_basis(cs)
    assert rep.ok
    assert rep.relations_checked == 49
    assert set(rep.self_pairings.values()) == {8}
    assert len(rep.self_pairings) == 28


def test_build_is_cached():
    assert build_clifford_system() is build_clifford_system()


def test_field_apply_examples(cs):
    x4 = LinearVectorField(cs.a(4))
    assert field_apply(x4, Poly.const(1)).is_zero()
    q = q_vars()
    for i in range(1, 8):
        assert field_apply(LinearVectorField(cs.a(i)), inner(q, q)).is_zero()
    x5 = LinearVectorField(cs.a(5))
    got = field_apply(x5, q[0])
    row = sum((q[k] * cs.a(5)[0, k] for k in range(8) if cs.a(5)[0, k]), Poly.zero())
    assert got == row


def test_field_at_is_matvec(cs):
    vf = LinearVectorField(cs.a(6))
    v = [1, 2, 3, 4, 5, 6, 7, 8]
    assert list(vf.at(v)) == list(cs.a(6).dot(np.array(v, dtype=object)))


@pytest.mark.parametrize("pair", [((1,), (2,)), ((1,), (1, 2)), ((3, 4), (5,)), ((1, 6), (2, 7)), ((6,), (6, 7))])
def test_field_bracket_rule(cs, pair):
    a, b = (cs.element(p) for p in pair)
    comm = a.dot(b) - b.dot(a)
    xa, xb, xc = LinearVectorField(a), LinearVectorField(b), LinearVectorField(comm)
    for m in monomials_upto(2):
        assert field_bracket(xa, xb, m) == -field_apply(xc, m)


def test_export_matrices_shape(cs):
    data = export_matrices(cs)
    assert len(data["matrices"]) == 7 and len(data["products"]) == 21
    assert data["matrices"]["A4"][0][4] == 1
