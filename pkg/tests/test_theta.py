import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobi_cohomology.group import S, T, GroupElement, JacobiElement
from jacobi_cohomology.multiplier import MultiplierSystem
from jacobi_cohomology.theta import (ConditioningError, JacobiFormData, ThetaSeries,
                                     fourier_jacobi_coefficients, heat_apply_fd,
                                     jacobi_slash_eval, skew_slash_eval, theta_decompose,
                                     theta_eval, theta_expand_eval)
from jacobi_cohomology.vvforms import cusp_spec

CHI = MultiplierSystem.eta(1)


@pytest.fixture(scope="module")
def forms():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        hol = JacobiFormData.from_poincare(Fraction(9, 2), 1, CHI, [cusp_spec(0, 1)], C=150)
        skew = JacobiFormData.from_poincare(Fraction(13, 2), 2, CHI, [cusp_spec(0, 1, 1j)],
                                            skew=True, C=150)
    return hol, skew


def test_theta_frozen():
    # sum_l exp(-2 pi l^2)
    assert abs(theta_eval(ThetaSeries(2), 1j, 0) - 1.003734885487739) < 1e-14


def test_theta_derivatives_match_differences():
    th = ThetaSeries.component(2, 3)
    tau, z, h = 0.1 + 0.7j, 0.2 - 0.1j, 1e-5
    dz = (th(tau, z + h) - th(tau, z - h)) / (2 * h)
    dt = (th(tau + h, z) - th(tau - h, z)) / (2 * h)
    assert abs(theta_eval(th, tau, z, (0, 1)) - dz) < 1e-6 * abs(dz)
    assert abs(theta_eval(th, tau, z, (1, 0)) - dt) < 1e-6 * abs(dt)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.floats(-0.5, 0.5), st.floats(0.6, 1.5),
       st.floats(-0.3, 0.3))
def test_theta_components_solve_heat_equation(m, j, x, y, zr):
    th = ThetaSeries.component(m, j % (2 * m))
    exact = (8j * np.pi * m * theta_eval(th, complex(x, y), zr, (1, 0))
             - theta_eval(th, complex(x, y), zr, (0, 2)))
    scale = abs(8j * np.pi * m * theta_eval(th, complex(x, y), zr, (1, 0)))
    assert abs(exact) <= 1e-10 * max(scale, 1e-30)


def test_heat_finite_difference_on_product():
    # L_m applied to a non-solution: exp(tau) z^2 gives -2 exp(tau) + 8 pi i m z^2 exp(tau)
    m, tau, z = 2, 0.3 + 1j, 0.4 + 0.1j
    res = heat_apply_fd(lambda t, w: np.exp(t) * w * w, m, tau, z)
    expect = 8j * np.pi * m * z * z * np.exp(tau) - 2 * np.exp(tau)
    assert abs(res.value - expect) < 1e-8 * abs(expect)


def _balanced(g):
    # tau and g tau both near height 1, where the stored Fourier data are accurate
    if g.c == 0:
        return 0.15 + 1.05j
    return -g.d / g.c + 0.05 + 1.0j / abs(g.c)


@pytest.mark.parametrize("g", [S, T, S @ T, GroupElement(2, 1, 1, 1)])
def test_holomorphic_form_is_invariant(forms, g):
    hol, _ = forms
    tau, z = np.array([_balanced(g)]), np.array([0.2 - 0.1j])
    for X in ((0, 0), (1, -2)):
        el = JacobiElement(g, *X)
        lhs = jacobi_slash_eval(hol, el, hol.weight, 1, hol.chi, tau, z)
        assert abs(lhs[0] - hol(tau, z)[0]) < 1e-7 * abs(hol(tau, z)[0])


@pytest.mark.parametrize("g", [S, T @ S, GroupElement(2, 1, 1, 1)])
def test_skew_form_is_invariant(forms, g):
    _, skew = forms
    tau, z = np.array([_balanced(g)]), np.array([0.1 + 0.05j])
    lhs = skew_slash_eval(skew, JacobiElement(g, 1, 1), skew.weight, 2, skew.chi, tau, z)
    # C = 150 truncation of the skew series leaves about 1e-7 relative
    assert abs(lhs[0] - skew(tau, z)[0]) < 1e-6 * abs(skew(tau, z)[0])


def test_skew_invariance_improves_with_truncation():
    tau, z = np.array([0.05 + 1j]), np.array([0.1 + 0.05j])
    errs = []
    for C in (75, 150):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            J = JacobiFormData.from_poincare(Fraction(13, 2), 2, CHI, [cusp_spec(0, 1)],
                                             skew=True, C=C)
        lhs = skew_slash_eval(J, S, J.weight, 2, J.chi, tau, z)
        errs.append(abs(lhs[0] - J(tau, z)[0]) / abs(J(tau, z)[0]))
    assert errs[1] < errs[0] / 8


def test_decompose_round_trip(forms):
    _, skew = forms
    tau = 0.05 + 0.9j
    f, cond = theta_decompose(skew, 2, tau)
    assert cond < 1e3
    assert np.allclose(f, skew.component_values(np.array([tau]))[0], rtol=1e-10, atol=1e-14)


def test_decompose_rejects_degenerate_points():
    with pytest.raises(ConditioningError):
        theta_decompose(lambda t, z: t + z, 1, 1j, zs=[0.1j, 0.1j])


def test_fourier_jacobi_discriminants(forms):
    hol, _ = forms
    coeffs = fourier_jacobi_coefficients(hol, 3)
    for (l, r), c in coeffs.items():
        # cusp form: every listed coefficient has positive discriminant
        assert 4 * l - r * r > 0 or abs(c) < 1e-10


def test_json_round_trip(forms):
    hol, skew = forms
    for J in (hol, skew):
        back = JacobiFormData.from_json(J.to_json())
        assert back.poincare == J.poincare and back.skew == J.skew
        assert abs(theta_expand_eval(back, 0.3 + 1j, 0.1) - J(0.3 + 1j, 0.1)) < 1e-14
