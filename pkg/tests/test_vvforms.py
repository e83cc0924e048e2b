import cmath
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import jv

from jacobi_cohomology.group import S, T
from jacobi_cohomology.multiplier import MultiplierSystem, weil_rep
from jacobi_cohomology.vvforms import (PoincareSpec, TruncationWarning, VVForm, VVType, c_plus,
                                       cf_constant, cusp_spec, poincare_eval, poincare_fourier,
                                       principal_part_of_specs, supplementary_data, vv_slash_eval)
from jacobi_cohomology.verify import delta_coefficients, scalar_type


def _kloosterman(m, n, c):
    return sum(cmath.exp(2j * math.pi * (m * pow(d, -1, c) + n * d) / c)
               for d in range(c) if math.gcd(d, c) == 1) if c > 1 else 1


def _petersson_coefficient(k, m, n, c_max=400):
    # Fourier coefficient of the m-th cusp Poincare series of weight k on SL(2,Z)
    tot = sum(_kloosterman(m, n, c) / c * jv(k - 1, 4 * math.pi * math.sqrt(m * n) / c)
              for c in range(1, c_max + 1))
    return (m == n) + 2 * math.pi * (-1) ** (k // 2) * (n / m) ** ((k - 1) / 2) * tot.real


@pytest.fixture(scope="module")
def p1():
    with warnings.catch_warnings():
        # only four coefficients are kept, so the edge mode is not negligible
        warnings.simplefilter("ignore")
        return poincare_fourier([cusp_spec(1, 1)], scalar_type(12), C=200, n_max=4)


def test_poincare_matches_kloosterman_bessel(p1):
    for n in (1, 2, 3):
        expect = _petersson_coefficient(12, 1, n)
        assert abs(p1.coefficient(n, 0) - expect) < 1e-9 * abs(expect)


def test_poincare_frozen(p1):
    assert abs(p1.coefficient(1, 0) - 2.8402873751675) < 1e-11
    assert p1.kind == "cusp"


def test_weight_12_poincare_is_delta(p1):
    tau = delta_coefficients(5)
    a1 = p1.coefficient(1, 0)
    for n in range(2, 5):
        assert abs(p1.coefficient(n, 0) / a1 - tau[n - 1]) < 1e-9 * abs(tau[n - 1])


@pytest.mark.parametrize("m", [1, 2])
def test_vector_valued_poincare_is_modular(m):
    vt = VVType(Fraction(9, 2), MultiplierSystem.eta(9), weil_rep(m))
    specs = [cusp_spec(0, 1), cusp_spec(1, 2, 0.5 - 0.3j)]
    tau = 0.21 + 1.1j

    def f(t):
        return poincare_eval(specs, vt, t, C=150)[0]

    for g in (S, T, S @ T @ T):
        assert np.allclose(vv_slash_eval(f, g, vt, tau), f(tau), atol=1e-6, rtol=0)


def test_kappa_zero_component_has_constant_term_removed():
    vt = scalar_type(12)
    assert vt.kappa.kappas == (Fraction(0),)
    with pytest.raises(ValueError):
        PoincareSpec(1, 0)


def test_low_weight_warns():
    with pytest.warns(TruncationWarning):
        poincare_eval([cusp_spec(1, 1)], scalar_type(2), [1j], C=4)


def test_supplementary_data():
    kap = VVType(Fraction(9, 2), MultiplierSystem.eta(9), weil_rep(1)).kappa
    out = supplementary_data([PoincareSpec(2, 1, 1 + 2j), PoincareSpec(-1, 2)], kap)
    assert out == [PoincareSpec(-1, 1, 1 - 2j), PoincareSpec(2, 2)]
    assert supplementary_data([PoincareSpec(3, 1)], scalar_type(12).kappa) == [
        PoincareSpec(-3, 1)]


def test_principal_part_of_weakly_holomorphic():
    vt = scalar_type(12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        f = poincare_fourier([PoincareSpec(1, 1, 2.0)], vt, C=200, n_max=3)
    assert f.kind == "weakly-holomorphic"
    pp = f.principal_part()
    assert principal_part_of_specs([PoincareSpec(1, 1, 2.0)], vt) == [{-1: 2.0}]
    assert abs(pp[0][-1] - 2.0) < 1e-8


def test_c_plus_enumeration():
    mats = list(c_plus(6))
    assert len(mats) == sum(sum(1 for a in range(c) if math.gcd(a, c) == 1)
                            for c in range(1, 7))
    assert all(g.a * g.d - g.b * g.c == 1 and 0 <= g.a < g.c for g in mats)


def test_cf_vanishes_without_kappa_zero():
    vt = VVType(Fraction(4), MultiplierSystem.eta(8), weil_rep(1))
    assert 0 not in vt.kappa.kappas
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        f = poincare_fourier([PoincareSpec(1, 1)], vt, C=50, n_max=2)
    assert np.all(cf_constant(f, C=50) == 0)


def test_vvform_json_round_trip(p1):
    back = VVForm.from_json(p1.to_json())
    assert back.diagnostics["height"] == p1.diagnostics["height"]
    assert np.allclose(back(0.3 + 1.2j), p1(0.3 + 1.2j))
    assert VVType.from_json(p1.vtype.to_json()).key() == p1.vtype.key()
