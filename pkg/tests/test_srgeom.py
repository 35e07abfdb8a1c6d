from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from sphere7.exact.poly import inner, xi_vars
from sphere7.liealg import so8
from sphere7.sampling import phase_points, random_float_phase_point
from sphere7.srgeom import (
    StructureKind,
    bracket_generating_report,
    build_hamiltonian,
    fat_counterexample_check,
    frame_gram_is_identity,
    linear_form,
    sample_sphere_points,
    sub_hamiltonian_j,
)
from sphere7.variety import PASS, certify_on_variety

E1 = [Fraction(1)] + [Fraction(0)] * 7


def _a_e1(cs, i):
    return [Fraction(int(x)) for x in cs.a(i)[:, 0]]


def test_kind_parsing():
    assert StructureKind.parse("Hopf") is StructureKind.T6H
    assert StructureKind.parse("t6") is StructureKind.T6H
    with pytest.raises(ValueError):
        StructureKind.parse("t7")


def test_t5_hamiltonian_at_frame_vector(cs):
    h = build_hamiltonian("t5", cs).poly
    assert h.evaluate(E1 + _a_e1(cs, 1)) == Fraction(1, 2)


@pytest.mark.parametrize("kind", list(StructureKind))
def test_hamiltonian_zero_at_zero_covector(cs, kind):
    h = build_hamiltonian(kind, cs).poly
    assert h.evaluate(E1 + [0] * 8) == 0


def test_qh_vanishes_on_vertical_covectors(cs):
    h = build_hamiltonian(StructureKind.QH, cs).poly
    for q in sample_sphere_points(3, 20):
        a6q = [sum(cs.a(6)[r, c] * q[c] for c in range(8)) for r in range(8)]
        assert h.evaluate(list(q) + a6q) == 0


@pytest.mark.parametrize("kind", list(StructureKind))
def test_hamiltonian_even_and_nonnegative(cs, kind):
    h = build_hamiltonian(kind, cs).poly
    assert h.substitute_sign(-1) == h
    fp = h.to_float()
    rng = np.random.default_rng(0)
    pts = np.array([np.concatenate(random_float_phase_point(rng)) for _ in range(200)])
    assert np.all(fp(pts) >= -1e-14)


@pytest.mark.parametrize("j,kind", [(4, StructureKind.T4), (5, StructureKind.T5), (6, StructureKind.T6H)])
def test_trivial_kinds_are_frame_sums(cs, j, kind):
    assert build_hamiltonian(kind, cs).poly == sub_hamiltonian_j(j, cs)


def test_monotone_sums_of_squares(cs):
    polys = [sub_hamiltonian_j(j, cs).to_float() for j in (4, 5, 6)]
    rng = np.random.default_rng(2)
    pts = np.array([np.concatenate(random_float_phase_point(rng)) for _ in range(200)])
    h4, h5, h6 = (p(pts) for p in polys)
    half = 0.5 * np.sum(pts[:, 8:] ** 2, axis=1)
    assert np.all(h4 <= h5 + 1e-14) and np.all(h5 <= h6 + 1e-14) and np.all(h6 <= half + 1e-14)


def test_hopf_complement_identity_on_variety(cs):
    xi = xi_vars()
    f7 = linear_form(cs.a(7))
    residual = sub_hamiltonian_j(6, cs) * 2 + f7 * f7 - inner(xi, xi)
    assert certify_on_variety(residual).status == PASS


def test_frame_orthonormal_at_sphere_points(cs):
    for q in sample_sphere_points(11, 30):
        assert frame_gram_is_identity(cs, q)


@pytest.fixture(scope="module")
def samples():
    return sample_sphere_points(42, 100)


def test_j3_not_bracket_generating(cs, samples):
    rep = bracket_generating_report(3, cs, samples)
    assert rep.closure_dim == 6
    assert max(rep.eval_dims) <= 6
    assert not rep.bracket_generating


@pytest.mark.parametrize("j", [4, 5, 6])
def test_step_two_bracket_generating(cs, samples, j):
    rep = bracket_generating_report(j, cs, samples)
    assert rep.step2_dims == [7] * 100
    assert rep.bracket_generating and rep.step_two


def test_j7_trivial(cs, samples):
    rep = bracket_generating_report(7, cs, samples[:5])
    assert rep.eval_dims == [7] * 5


def test_rejects_off_sphere_sample(cs):
    with pytest.raises(ValueError):
        bracket_generating_report(4, cs, [[Fraction(2)] + [Fraction(0)] * 7])


def test_fat_counterexamples(cs):
    rep = fat_counterexample_check(cs, trials=100, seed=0)
    assert rep.rank_j5_north_pole == 5
    assert rep.rank_j4_north_pole == 5
    assert rep.j6_ranks == [7] * 100
    assert "no counterexample found in 100 trials" in rep.to_json()["j6_statement"]


def test_linear_form_matches_pairing(cs):
    alg = so8(cs)
    rng = random.Random(0)
    for pt in phase_points(4, 5):
        e = alg.elements[rng.randrange(28)]
        f = linear_form(e).evaluate(pt.coords())
        q, xi = pt.q, pt.xi
        direct = sum(sum(e.m[r, c] * q[c] for c in range(8)) * xi[r] for r in range(8))
        assert f == direct
