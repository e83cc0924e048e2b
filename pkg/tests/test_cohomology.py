import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobi_cohomology.cohomology import (Cocycle, JacobiContext, JacobiPolyVector, PolyVector,
                                          alpha_cocycle, beta_cocycle, coboundary_solve,
                                          eta_map, lift_vv_cocycle, parabolic_check,
                                          pe_membership)
from jacobi_cohomology.group import S, T, GroupElement, JacobiElement, Word
from jacobi_cohomology.multiplier import MultiplierSystem, RelationError
from jacobi_cohomology.theta import JacobiFormData, jacobi_slash_eval
from jacobi_cohomology.vvforms import cusp_spec
from jacobi_cohomology.verify import _eta_inputs, scalar_type

from test_numeric import sl2

CHI = MultiplierSystem.eta(1)
J1 = JacobiContext(2, 1, CHI)
J2 = JacobiContext(2, 2, CHI)


def _random_poly(ctx, seed):
    rng = np.random.default_rng(seed)
    shape = (ctx.dim, -int(ctx.weight) + 1)
    return PolyVector(ctx, rng.normal(size=shape) + 1j * rng.normal(size=shape))


def test_context_types():
    assert J1.weight == Fraction(-3, 2)
    assert J1.vv.kappa.kappas == (Fraction(1, 24), Fraction(19, 24))
    assert J2.vv.dim == 4


@settings(max_examples=30, deadline=None)
@given(sl2(), sl2(), st.integers(0, 100))
def test_slash_is_right_action(g1, g2, seed):
    p = _random_poly(J2.vv, seed)
    lhs = p.slash(g1).slash(g2)
    rhs = p.slash(g1 @ g2)
    assert (lhs - rhs).norm() < 1e-9 * max(1.0, rhs.norm())


@settings(max_examples=30, deadline=None)
@given(sl2(), st.integers(0, 100))
def test_coboundary_values(g, seed):
    p = _random_poly(J1.vv, seed)
    c = Cocycle.coboundary(p)
    expect = p.slash(g) - p
    assert (c.evaluate(g) - expect).norm() < 1e-9 * max(1.0, expect.norm())


def test_cocycle_independent_of_word():
    c = Cocycle.coboundary(_random_poly(J2.vv, 1))
    # pairs of words with equal products, via S^4 = I and (ST)^3 = S^2
    for w1, w2 in (("S S S S T", "T"), ("S T S T S T", "S S"), ("T^2 S^-1", "T T S S S")):
        a, b = Word.parse(w1), Word.parse(w2)
        assert a.product() == b.product()
        assert np.allclose(c.evaluate_word(a), c.evaluate_word(b), atol=1e-10)
    w = Word.parse("S T^-1 S^-1 T^2")
    assert np.allclose(c.evaluate_word(w), c.evaluate(w.product()).flat())
    assert c.evaluate(GroupElement(1, 0, 0, 1)).norm() == 0


def test_relations_detected():
    rng = np.random.default_rng(5)
    n = J1.vv.dim * 3
    bad = Cocycle(J1.vv, rng.normal(size=n), rng.normal(size=n))
    assert bad.relation_residual() > 1e-2
    with pytest.raises(RelationError):
        bad.check_relations()
    Cocycle.coboundary(_random_poly(J1.vv, 2)).check_relations()


def test_coboundary_solve_recovers_witness():
    p = _random_poly(J2.vv, 3)
    rep = coboundary_solve(Cocycle.coboundary(p))
    assert rep.is_coboundary and rep.residual < 1e-10
    assert rep.kernel_dim == 0
    assert (rep.witness - p).norm() < 1e-8 * p.norm()
    assert rep.is_parabolic


def test_kernel_dimension_for_trivial_type():
    ctx = scalar_type(0)
    rep = coboundary_solve(Cocycle.zero(ctx))
    assert rep.kernel_dim == 1 and rep.residual == 0


def test_parabolic_check_rejects_top_degree_translation_value():
    ctx = scalar_type(-2)
    c = Cocycle(ctx, np.zeros(3), np.array([0, 0, 1.0]))
    ok, _, res = parabolic_check(c)
    assert not ok and res > 0.1


def test_jacobi_poly_vector_slash_and_heat():
    G = JacobiPolyVector(J1, _random_poly(J1.vv, 4))
    assert G.heat_power(J1.k + 1).norm() == 0
    g = JacobiElement(GroupElement(1, 1, 1, 2), 2, -1)
    tau, z = np.array([0.2 + 0.9j]), np.array([0.1 - 0.2j])
    lhs = jacobi_slash_eval(G, g, J1.weight, 1, CHI, tau, z)
    assert abs(lhs - G.slash(g)(tau, z))[0] < 1e-9 * abs(lhs[0])


def test_pe_membership():
    G = JacobiPolyVector(J2, _random_poly(J2.vv, 6))
    ok, back, res = pe_membership(G, J2)
    assert ok and res < 1e-10
    assert (back - G).norm() < 1e-8 * G.norm()
    ok, back, res = pe_membership(lambda t, z: G(t, z) * t ** 3, J2)
    assert not ok and back is None and res > 1e-3


def test_lift_checks_context():
    c = Cocycle.coboundary(_random_poly(J1.vv, 7))
    assert lift_vv_cocycle(c, J1).kind == "jacobi"
    with pytest.raises(ValueError):
        lift_vv_cocycle(c, J2)
    with pytest.raises(ValueError):
        lift_vv_cocycle(Cocycle.coboundary(_random_poly(scalar_type(-2), 7)), J1)


def test_jacobi_cocycle_values_and_json():
    c = lift_vv_cocycle(Cocycle.coboundary(_random_poly(J2.vv, 8)), J2)
    v = c.evaluate(JacobiElement(S, 3, 1))
    assert isinstance(v, JacobiPolyVector)
    assert np.allclose(v.flat(), c.evaluate(S).flat())
    back = Cocycle.from_json(c.to_json())
    assert back.kind == "jacobi" and back.jctx.m == 2
    assert np.array_equal(back.s_value, c.s_value)
    vv = Cocycle.coboundary(_random_poly(J1.vv, 9))
    assert np.array_equal(Cocycle.from_json(vv.to_json()).t_value, vv.t_value)


def test_eta_map_argument_checks():
    with pytest.raises(ValueError):
        eta_map()
    zero = eta_map(jctx=J1)
    assert not zero.s_value.any() and not zero.t_value.any()


@pytest.fixture(scope="module")
def eta_inputs():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return _eta_inputs(2, 2, 200)


def test_beta_and_alpha_need_the_right_kind(eta_inputs):
    Phi, Psi = eta_inputs
    with pytest.raises(ValueError):
        beta_cocycle(Psi)
    with pytest.raises(ValueError):
        alpha_cocycle(Phi)


def test_eta_image_is_parabolic_cocycle(eta_inputs):
    Phi, Psi = eta_inputs
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        c = eta_map(Phi, Psi)
    # Poincare truncation at C = 200 limits the relations to about 1e-7
    assert c.relation_residual() < 1e-6
    assert parabolic_check(c)[0]
    assert pe_membership(c.evaluate(T @ S), J2)[0]


def test_conjugated_alpha_breaks_relations(eta_inputs):
    _, Psi = eta_inputs
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        good = alpha_cocycle(Psi)
        bad = alpha_cocycle(Psi, conjugate_alpha=True)
    assert good.relation_residual() < 1e-6
    assert bad.relation_residual() > 0.1


def test_two_words_for_lower_translation():
    c = Cocycle.coboundary(_random_poly(J1.vv, 11))
    a, b = Word.parse("S T^-1 S^-1"), Word.parse("S^-1 T^-1 S")
    assert a.product() == b.product() == GroupElement(1, 0, 1, 1)
    assert np.abs(c.evaluate_word(a) - c.evaluate_word(b)).max() < 1e-8


@settings(max_examples=20, deadline=None)
@given(sl2(), sl2(), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3),
       st.integers(-3, 3))
def test_jacobi_cocycle_law(g1, g2, l1, m1, l2, m2):
    c = lift_vv_cocycle(Cocycle.coboundary(_random_poly(J2.vv, 12)), J2)
    A, B = JacobiElement(g1, l1, m1), JacobiElement(g2, l2, m2)
    lhs = c.evaluate(A @ B)
    rhs = c.evaluate(A).slash(B) + c.evaluate(B)
    assert (lhs - rhs).norm() < 1e-8 * max(1.0, lhs.norm())


def test_eta_map_is_linear():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = Fraction(9, 2)
        P1 = JacobiFormData.from_poincare(w, 1, CHI, [cusp_spec(0, 1)], C=100)
        P2 = JacobiFormData.from_poincare(w, 1, CHI, [cusp_spec(1, 2)], C=100)
        a, b = 2 - 1j, 0.5j
        comps = [x.scale(a) + y.scale(b) for x, y in zip(P1.components, P2.components)]
        mix = JacobiFormData(w, 1, CHI, False, comps)
        lhs = eta_map(mix)
        rhs = eta_map(P1) * a + eta_map(P2) * b
    for g in (S, T @ S, GroupElement(2, 1, 1, 1)):
        d = (lhs.evaluate(g) - rhs.evaluate(g)).norm()
        assert d < 1e-8 * lhs.evaluate(g).norm()
