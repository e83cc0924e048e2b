import warnings
from fractions import Fraction

import numpy as np
import pytest

from jacobi_cohomology.cohomology import Cocycle, PolyVector
from jacobi_cohomology.group import S, T, GroupElement
from jacobi_cohomology.numeric import FourierSeries
from jacobi_cohomology.periods import (PeriodPolynomial, c_const, eichler_holo,
                                       eichler_holo_integral, gen_poincare_eval, period_cocycle,
                                       period_hol, period_hol_from_eichler, period_nodes,
                                       period_nonhol, weight_minus_k)
from jacobi_cohomology.vvforms import VVForm
from jacobi_cohomology.verify import scalar_type

# ratios of the period polynomial of the discriminant function on S, normalised at X and X^2
ODD = [1, Fraction(-25, 4), Fraction(21, 2), Fraction(-25, 4), 1]
EVEN = [Fraction(-36, 691), 1, -3, 3, -1, Fraction(36, 691)]


@pytest.fixture(scope="module")
def r_s(delta):
    return period_hol(delta, S)


def test_c_const_frozen():
    assert abs(c_const(0) - 1j / (2 * np.pi)) < 1e-15
    assert abs(c_const(2) - (-2 / (2j * np.pi) ** 3)) < 1e-15


def test_nodes():
    nodes = period_nodes(10)
    assert len(nodes) == 12
    assert np.allclose(nodes.imag, 1) and nodes[0] == -1 + 1j


def test_delta_odd_period_ratios(r_s):
    c = r_s.coeffs[0]
    assert np.allclose(c[1::2] / c[1], [float(x) for x in ODD], rtol=0, atol=1e-8)


def test_delta_even_period_ratios(r_s):
    c = r_s.coeffs[0]
    assert np.allclose(c[0::2] / c[2], [float(x) for x in EVEN], rtol=0, atol=1e-8)


def test_fit_residual_reported(r_s):
    assert r_s.residual < 1e-9


def test_period_on_translation_is_zero(delta):
    assert not np.any(period_hol(delta, T).coeffs)


def test_cocycle_matches_direct_period(delta):
    c = period_cocycle(delta)
    # fit error ~3e-11 is amplified by binomial entries of the weight -10 slash
    assert c.relation_residual() < 1e-7
    g = GroupElement(2, 1, 1, 1)
    direct = period_hol(delta, g).coeffs
    via_words = c.evaluate(g).coeffs
    assert np.abs(direct - via_words).max() < 1e-7 * np.abs(direct).max()


def test_series_and_integral_routes_agree(delta):
    a = period_hol_from_eichler(delta, S, method="integral")
    b = period_hol(delta, S)
    assert np.abs(a.coeffs - b.coeffs).max() < 1e-9 * np.abs(b.coeffs).max()


def test_eichler_series_matches_quadrature(delta):
    tau = np.array([0.1 + 1.2j, -0.3 + 1.5j])
    E = eichler_holo(delta)
    series = c_const(10) * E(tau)
    integral = eichler_holo_integral(delta, tau)
    assert np.allclose(series, integral, rtol=1e-9, atol=0)


def test_eichler_rejects_constant_term():
    vt = scalar_type(4)
    f = VVForm(vt, [FourierSeries(1, 0, np.array([0, 1]), np.array([1.0, 240.0]))], "holomorphic")
    with pytest.raises(ValueError):
        eichler_holo(f)


def test_weight_must_match(delta):
    with pytest.raises(ValueError):
        period_hol(delta, S, k=8)


def test_nonholomorphic_periods_form_a_cocycle(delta):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rs, rt = period_nonhol(delta, S), period_nonhol(delta, T)
    c = Cocycle(weight_minus_k(delta.vtype, 10).conjugate(), rs.coeffs, rt.coeffs)
    assert c.relation_residual() < 1e-7


def test_period_polynomial_json(r_s):
    back = PeriodPolynomial.from_json(r_s.to_json(), r_s.ctx)
    assert back.gamma == S
    assert np.array_equal(back.coeffs, r_s.coeffs)
    assert abs(back(0.3j) - r_s(0.3j)).max() == 0


def test_generalized_poincare_needs_vanishing_t(r_s):
    ctx = r_s.ctx
    c = Cocycle(ctx, r_s.coeffs, PolyVector(ctx, np.ones((1, 11))).coeffs)
    with pytest.raises(ValueError):
        gen_poincare_eval(c, 20, 1j, C=5)


def test_generalized_poincare_converges(delta):
    c = period_cocycle(delta)
    a = gen_poincare_eval(c, 20, [0.2 + 1.1j], C=25)
    b = gen_poincare_eval(c, 20, [0.2 + 1.1j], C=50)
    assert np.abs(a - b).max() < 1e-10 * np.abs(b).max()
