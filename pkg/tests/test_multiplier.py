import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from jacobi_cohomology.group import MINUS_I, S, T, GroupElement
from jacobi_cohomology.multiplier import (MultiplierSystem, RelationError, UnitaryRep, dedekind_sum,
                                          eta_eval,
                                          eta_multiplier, kappa_diag, weil_rep)
from jacobi_cohomology.numeric import e

from test_numeric import sl2

TAU = 0.1 + 0.8j


def test_eta_value_frozen():
    # eta(i) = Gamma(1/4) / (2 pi^(3/4))
    assert abs(eta_eval(1j) - 0.7682254223260566) < 1e-14


def _sawtooth(x: Fraction) -> Fraction:
    return Fraction(0) if x.denominator == 1 else x - math.floor(x) - Fraction(1, 2)


def _dedekind_sum(d: int, c: int) -> Fraction:
    return sum((_sawtooth(Fraction(r, c)) * _sawtooth(Fraction(d * r, c)) for r in range(1, c)),
               Fraction(0))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 400), st.integers(-400, 400))
def test_dedekind_sum_reciprocity_matches_definition(k, h):
    assume(math.gcd(h, k) == 1)
    assert dedekind_sum(h, k) == _dedekind_sum(h, k)


def test_dedekind_sum_frozen():
    assert dedekind_sum(1, 5) == Fraction(1, 5)
    assert dedekind_sum(2, 7) == Fraction(1, 14)


@settings(max_examples=30, deadline=None)
@given(sl2(bound=2))
def test_eta_transformation(g):
    assume(abs(g.c) <= 8 and abs(g.d) <= 8)
    lhs = eta_eval(g.act(TAU))
    rhs = eta_multiplier(g) * np.sqrt(g.j(TAU) + 0j) * eta_eval(TAU)
    assert abs(lhs - rhs) < 1e-10 * abs(rhs)


def test_eta_multiplier_large_entries():
    g = GroupElement(-3321, 275, 1582, -131)
    assert abs(eta_multiplier(g, check=True) - MultiplierSystem.eta(1)(g)) < 1e-11


@settings(max_examples=40, deadline=None)
@given(sl2(bound=60))
def test_word_evaluation_matches_eta(g):
    chi = MultiplierSystem.eta(1)
    assert abs(chi(g) - eta_multiplier(g)) < 1e-11


def test_generator_values():
    chi = MultiplierSystem.eta(3)
    assert abs(chi(T) - e(3 / 24)) < 1e-15
    assert abs(chi(S) - e(-3 / 8)) < 1e-15
    # chi(-I) = e(-w/2) for weight w
    assert abs(chi(MINUS_I) - e(-3 / 4)) < 1e-12
    assert chi.relation_residual() < 1e-12


def test_inconsistent_multiplier_detected():
    bad = MultiplierSystem(Fraction(1, 2), 1, 1)
    assert bad.relation_residual() > 0.1


def test_multiplier_json_round_trip():
    chi = MultiplierSystem.eta(5).at_weight(Fraction(-3, 2))
    back = MultiplierSystem.from_json(chi.to_json())
    assert back == chi


@pytest.mark.parametrize("m", [1, 2, 3])
def test_weil_rep_is_representation(m):
    rho = weil_rep(m)
    assert rho.dim == 2 * m
    assert rho.is_representation()
    s = rho(S)
    assert np.allclose(s @ s.conj().T, np.eye(2 * m))


def test_weil_rep_projective_with_trivial_character():
    with pytest.raises(RelationError):
        weil_rep(1, MultiplierSystem.trivial())


def test_kappa_frozen():
    rho = weil_rep(1)
    assert kappa_diag(MultiplierSystem.trivial(), rho).kappas == (Fraction(1, 24),
                                                                  Fraction(19, 24))
    assert kappa_diag(MultiplierSystem.eta(9), rho).kappas == (Fraction(5, 12), Fraction(1, 6))
    assert kappa_diag(MultiplierSystem.eta(8), rho).kappas == (Fraction(3, 8), Fraction(1, 8))


def test_unitary_rep_json_round_trip():
    rho = weil_rep(2)
    back = UnitaryRep.from_json(rho.to_json())
    assert np.allclose(back(S @ T), rho(S @ T))
