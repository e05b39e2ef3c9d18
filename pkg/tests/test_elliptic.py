from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from voatorus.coeff import LAM, ONE, ZERO, Scalar
from voatorus.elliptic import (RPoly, bernoulli, cubic_residual, eisenstein, eisenstein_reduce,
                               negate_var, p_series, reduce_to_R, wp_tilde)
from voatorus.fps import MultiSeries


def test_bernoulli():
    assert [bernoulli(n) for n in (0, 1, 2, 4, 6)] == [1, Fraction(-1, 2), Fraction(1, 6), Fraction(-1, 30),
                                                      Fraction(1, 42)]


def test_eisenstein_coefficients():
    g2 = eisenstein(1, 4)
    assert g2.coeff((0,)) == -LAM ** 2 / 12
    g4 = eisenstein(2, 4)
    assert g4.coeff((0,)) == LAM ** 4 / 720
    assert g4.coeff((1,)) == LAM ** 4 / 3
    # constant term of G4 is 2 zeta(4), compare with the direct sum
    s = sum(2.0 / l ** 4 for l in range(1, 2000))
    assert abs(complex(g4.coeff((0,))).real - s) < 1e-9


def test_p_series_examples():
    N = 3
    p1 = p_series(1, N, 2)
    for l in range(1, N + 1):
        assert p1.coeff((l, 0)) == LAM
    assert p1.coeff((-1, 1)) == -LAM
    assert p1.coeff((0, 0)) == ZERO
    p2 = p_series(2, N, 2)
    for l in range(1, N + 1):
        assert p2.coeff((l, 0)) == LAM ** 2 * l


def test_wp_examples():
    w1 = wp_tilde(1, 7, 4).series
    assert w1.coeff((-1, 0)) == ONE
    for k in (1, 2, 3):
        G = eisenstein(k + 1, 4)
        for j in range(5):
            assert w1.coeff((2 * k + 1, j)) == -G.coeff((j,))
    w2 = wp_tilde(2, 6, 4).series
    assert all(not w2.coeff((0, j)) for j in range(5))


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_wp_derivative_relation(m):
    a = wp_tilde(m, 8, 4).series.deriv("y").scale(Scalar.const(Fraction(-1, m)))
    b = wp_tilde(m + 1, 7, 4).series
    for k, c in b.terms.items():
        assert a.coeff(k) == c
    for k, c in a.terms.items():
        if k[0] <= 7:
            assert b.coeff(k) == c


@pytest.mark.parametrize("m", [2, 3, 4])
def test_wp_parity(m):
    s = wp_tilde(m, 8, 4).series
    assert negate_var(s, "y") == s.scale(Scalar.const((-1) ** m))


def test_cubic_relation():
    assert cubic_residual(10, 8).is_zero()


def test_eisenstein_reduce():
    assert eisenstein_reduce(2, 12) == RPoly.sym("G4")
    p8 = eisenstein_reduce(4, 12)
    assert p8 == RPoly({(2, 0, 0, 0): Fraction(3, 7)})
    assert str(p8) == "3/7*G4^2"
    p10 = eisenstein_reduce(5, 12)
    assert set(p10.terms) == {(1, 1, 0, 0)}
    eisenstein_reduce(6, 12)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_reduce_to_R(m):
    p = reduce_to_R(m)
    assert p.weights() == {m}


def test_reduce_to_R_m2_is_symbol():
    assert reduce_to_R(2) == RPoly.sym("P2")


@given(st.integers(1, 4), st.integers(1, 4))
@settings(max_examples=10, deadline=None)
def test_eisenstein_truncation_consistent(k, n):
    """Raising the q-order only appends coefficients."""
    a = eisenstein(k, n)
    b = eisenstein(k, n + 3)
    assert all(a.coeff((j,)) == b.coeff((j,)) for j in range(n + 1))
