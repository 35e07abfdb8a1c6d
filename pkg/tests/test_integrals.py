from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere7.exact.poly import Poly, inner, q_vars, xi_vars
from sphere7.integrals import (
    OFF_VARIETY_POINT,
    MomentumMap,
    build_integrals,
    decomposition_residual,
    gradient_rank,
    poisson_bracket,
    thimm_matrix,
    verify_decompositions,
    verify_independence,
    verify_involution,
)
from sphere7.liealg import bracket, build_chain, so8
from sphere7.sampling import ScaledPoint, phase_points, random_float_phase_point
from sphere7.srgeom import StructureKind, build_hamiltonian, linear_form
from sphere7.variety import PASS, certify_on_variety

E1 = [Fraction(1)] + [Fraction(0)] * 7


@pytest.fixture(scope="module")
def isets(cs):
    return {k: build_integrals(build_chain(k, cs)) for k in "GHK"}


def test_bracket_of_linear_forms(cs):
    alg = so8(cs)
    a1, a2 = alg.element((1,)), alg.element((2,))
    assert poisson_bracket(linear_form(a1), linear_form(a2)) == linear_form(bracket(a1, a2))
    assert poisson_bracket(linear_form(a1), linear_form(a2)) == linear_form(alg.element((1, 2))) * 2


def test_linear_forms_are_a_lie_morphism(cs):
    alg = so8(cs)
    rng = random.Random(3)
    for _ in range(30):
        a, b = alg.elements[rng.randrange(28)], alg.elements[rng.randrange(28)]
        assert poisson_bracket(linear_form(a), linear_form(b)) == linear_form(bracket(a, b))


def test_xi_norm_commutes_with_linear_forms(cs):
    xi = xi_vars()
    n2 = inner(xi, xi)
    for e in so8(cs).elements:
        assert poisson_bracket(n2, linear_form(e)).is_zero()


low_deg = st.lists(
    st.tuples(st.lists(st.integers(0, 1), min_size=16, max_size=16), st.integers(-3, 3)), min_size=1, max_size=3
).map(Poly.from_exponents)


@given(low_deg, low_deg, low_deg)
@settings(max_examples=25, deadline=None)
def test_poisson_jacobi_and_antisymmetry(f, g, h):
    assert poisson_bracket(f, f).is_zero()
    assert poisson_bracket(f, g) == -poisson_bracket(g, f)
    total = poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f)) \
        + poisson_bracket(h, poisson_bracket(f, g))
    assert total.is_zero()


def test_momentum_map_pairing(cs):
    mm = MomentumMap(cs)
    w = mm.wedge()
    for i in range(8):
        for j in range(8):
            assert w[i][j] == -w[j][i]
    for e in so8(cs).elements:
        assert mm.pairing(e) == linear_form(e)


def test_integral_examples(cs, isets):
    g = isets["G"]
    f12 = linear_form(so8(cs).element((1, 2)))
    assert g.integral(1) == f12 * f12 * Fraction(1, 2)
    a1e1 = [Fraction(int(x)) for x in cs.a(1)[:, 0]]
    assert g.integral(7).evaluate(E1 + a1e1) == 2
    k = cs.hopf_k
    for pt in phase_points(9, 5):
        kq = [sum(k[r, c] * pt.q[c] for c in range(8)) for r in range(8)]
        assert g.alt_integrals[4].evaluate(list(pt.q) + kq) == 1


@pytest.mark.parametrize("kind", ["G", "H", "K"])
def test_casimir_level_is_twice_xi_norm_on_variety(isets, kind):
    q, xi = q_vars(), xi_vars()
    i7 = isets[kind].integral(7)
    assert i7 == (inner(q, q) * inner(xi, xi) - inner(q, xi) ** 2) * 2
    assert certify_on_variety(i7 - inner(xi, xi) * 2).status == PASS


@pytest.mark.parametrize("kind", ["G", "H", "K"])
def test_integrals_nonnegative(isets, kind):
    rng = np.random.default_rng(5)
    pts = np.array([np.concatenate(random_float_phase_point(rng)) * 3 for _ in range(100)])
    for p in isets[kind].integrals:
        assert np.all(p.to_float()(pts) >= -1e-12)


@pytest.mark.parametrize("kind", ["G", "H", "K"])
def test_all_pairs_commute_on_r16(isets, kind):
    iset = isets[kind]
    for a, b in combinations(range(1, 8), 2):
        assert poisson_bracket(iset.integral(a), iset.integral(b)).is_zero()


def test_g_alt_integrals_commute(isets):
    alt = isets["G"].alt_integrals
    for a, b in combinations(range(7), 2):
        assert poisson_bracket(alt[a], alt[b]).is_zero()


@pytest.mark.parametrize("kind,structures", [("G", ["t5", "qh"]), ("H", ["t4"]), ("K", ["t6h"])])
def test_involution_reports(cs, isets, kind, structures):
    hams = [build_hamiltonian(s, cs) for s in structures]
    rep = verify_involution(isets[kind], hams, samples=1000, seed=1)
    assert rep.status == PASS
    assert len(rep.pair_checks) == 21
    assert len(rep.hamiltonian_checks) == len(structures)


def test_t5_commutes_with_i6_on_variety(cs, isets):
    br = poisson_bracket(build_hamiltonian("t5", cs).poly, isets["G"].integral(6))
    assert certify_on_variety(br).status == PASS


@pytest.mark.parametrize("kind", ["G", "H", "K"])
def test_projection_rank_seven(isets, kind):
    rep = verify_independence(isets[kind], trials=20, points=5, seed=0)
    assert rep.status == PASS and rep.ranks == [7] * 5


def test_zero_covector_forces_resample(isets):
    zero_xi = ScaledPoint((1, 0, 0, 0, 0, 0, 0, 0), 1, (0,) * 8, 1)
    assert np.linalg.matrix_rank(np.array(thimm_matrix(isets["G"], zero_xi), dtype=float)) == 0
    rep = verify_independence(isets["G"], trials=20, points=1, seed=0, forced_points=[zero_xi])
    assert rep.resamples == 1 and rep.ranks == [7]


@pytest.mark.parametrize("kind,relation", [
    ("G", {4: 8, 6: -4, 7: -1}),
    ("H", {3: 2, 6: -1}),
    ("K", {5: 4, 6: -2, 7: -1}),
])
def test_linear_relation_among_pulled_back_integrals(isets, kind, relation):
    iset = isets[kind]
    combo = sum((iset.integral(l) * c for l, c in relation.items()), Poly.zero())
    assert combo.is_zero()
    pt = phase_points(2, 1)[0]
    assert gradient_rank(iset.integrals, pt) == 6


def test_gradients_match_finite_differences(isets):
    rng = np.random.default_rng(8)
    h = 1e-6
    for p in isets["G"].integrals:
        fp = p.to_float()
        for _ in range(10):
            x = np.concatenate(random_float_phase_point(rng))
            g = fp.gradient(x[None, :])[0]
            fd = np.array([(fp((x + h * e)[None, :])[0] - fp((x - h * e)[None, :])[0]) / (2 * h) for e in np.eye(16)])
            assert np.linalg.norm(g - fd) <= 1e-7 * max(1.0, np.linalg.norm(g))


def test_decompositions_on_variety(cs, isets):
    results = {r.structure: r for r in verify_decompositions(cs, isets, samples=1000, seed=0)}
    assert set(results) == set(StructureKind)
    for r in results.values():
        assert r.status == PASS


def test_decomposition_residuals_global_structure(cs, isets):
    # the T-kind residuals vanish on all of R^16; only QH needs the constraints
    for kind in (StructureKind.T4, StructureKind.T5, StructureKind.T6H):
        assert decomposition_residual(kind, cs, isets).is_zero()
    qh = decomposition_residual(StructureKind.QH, cs, isets)
    assert not qh.is_zero()
    assert qh.evaluate(OFF_VARIETY_POINT) == Fraction(-27, 2)
