import math

import pytest
from hypothesis import given, settings, strategies as st

from jacobi_cohomology.group import (I, MINUS_I, S, T, GroupElement, JacobiElement, Word,
                                     coset_reps, jacobi_act, jacobi_compose,
                                     reduce_to_fundamental, word_decompose)

from test_numeric import sl2


def test_generators():
    assert S @ S == MINUS_I
    assert (S @ T) ** 3 == MINUS_I
    assert S.inverse() == -S


def test_rejects_determinant():
    with pytest.raises(ValueError):
        GroupElement(2, 0, 0, 1)


@settings(max_examples=100, deadline=None)
@given(sl2(bound=50))
def test_word_decompose_round_trip(g):
    assert word_decompose(g).product() == g


def test_word_length_logarithmic():
    g = GroupElement(1346269, 832040, 832040, 514229)  # Fibonacci matrix
    assert g.a * g.d - g.b * g.c == 1
    w = word_decompose(g)
    assert w.product() == g
    assert len(w) <= 2 * math.ceil(math.log2(1346269)) + 4


def test_word_parse():
    w = Word.parse("S T^-1 S^-1")
    assert w.tokens() == ["S", "T^-1", "S^-1"]
    assert w.product() == S @ T.inverse() @ S.inverse()
    with pytest.raises(ValueError):
        Word.parse("U")


def test_coset_reps_count():
    C = 12
    expected = 1 + sum(sum(1 for d in range(c) if math.gcd(c, d) == 1) for c in range(1, C + 1))
    reps = coset_reps(C)
    assert len(reps) == expected == 47
    assert len({(g.c, g.d) for g in reps}) == len(reps)


@given(st.floats(-3, 3), st.floats(0.05, 3))
def test_reduce_to_fundamental(x, y):
    g, w = reduce_to_fundamental(complex(x, y))
    assert abs(w) >= 1 - 1e-9 and abs(w.real) <= 0.5 + 1e-9
    assert abs(g.act(complex(x, y)) - w) < 1e-9 * max(1, abs(w))


@settings(max_examples=40, deadline=None)
@given(sl2(), sl2(), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3),
       st.integers(-3, 3))
def test_jacobi_action_composes(g1, g2, l1, m1, l2, m2):
    A = JacobiElement(g1, l1, m1)
    B = JacobiElement(g2, l2, m2)
    tau, z = 0.2 + 0.9j, 0.1 - 0.3j
    t1, z1 = jacobi_act(B, tau, z)
    lhs = jacobi_act(A, t1, z1)
    rhs = jacobi_act(jacobi_compose(A, B), tau, z)
    assert abs(lhs[0] - rhs[0]) < 1e-9 and abs(lhs[1] - rhs[1]) < 1e-9
