from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from voatorus.coeff import LAM, ONE, ZERO, Scalar
from voatorus.fps import (MultiSeries, comp_inverse, compose, delta_expand, exp_derivation_coeffs,
                          exp_series, log1p_series, mul, series_inverse)

N = 8
rats = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def uni(coeffs, hi=N):
    return MultiSeries.univariate("y", coeffs, hi=hi)


def coeffs_of(f, upto=N):
    return [f.coeff((k,)) for k in range(upto + 1)]


@st.composite
def series(draw, start=0):
    d = draw(st.dictionaries(st.integers(start, N), rats, max_size=5))
    return uni({k: Scalar.const(v) for k, v in d.items()})


@st.composite
def tangent_series(draw):
    """y + O(y^2), suitable for composition inversion."""
    d = draw(st.dictionaries(st.integers(2, N), rats, max_size=4))
    d[1] = Fraction(1)
    return uni({k: Scalar.const(v) for k, v in d.items()})


def test_product_examples():
    a = uni({0: 1, 1: 1})
    b = uni({0: 1, 1: -1})
    assert mul(a, b) == uni({0: 1, 2: -1})
    geo = uni({k: 1 for k in range(N + 1)})
    assert coeffs_of(mul(geo, b)) == [ONE] + [ZERO] * N


def test_composition_examples():
    y = uni({1: 1})
    g = uni({1: 1, 2: 1})
    assert compose(y, g) == g
    sq = compose(uni({2: 1}), g)
    assert coeffs_of(sq, 4) == [ZERO, ZERO, ONE, 2 * ONE, ONE]


def test_log_exp_inverse():
    f = exp_series("y", LAM, N)
    f = uni({k: c / LAM for k, c in ((k, f.coeff((k,))) for k in range(1, N + 1))})
    g = log1p_series("y", LAM, N)
    assert coeffs_of(compose(f, g)) == coeffs_of(uni({1: 1}))
    assert coeffs_of(comp_inverse(g, N)) == coeffs_of(f)


def test_lagrange_example():
    inv = comp_inverse(uni({1: 1, 2: 1}), 4)
    assert coeffs_of(inv, 4) == [ZERO, ONE, -ONE, 2 * ONE, -5 * ONE]


def test_derivation_coefficients():
    c = exp_derivation_coeffs(log1p_series("y", LAM, 6), 2)
    assert list(c) == [-LAM / 2, LAM ** 2 / 12]
    c = exp_derivation_coeffs(log1p_series("y", ONE, 6), 2)
    assert list(c) == [Scalar.const(Fraction(-1, 2)), Scalar.const(Fraction(1, 12))]
    assert all(not x for x in exp_derivation_coeffs(uni({1: 1}), 4))


def test_derivation_needs_enough_terms():
    with pytest.raises(ValueError):
        exp_derivation_coeffs(log1p_series("y", LAM, 3), 5)


def test_delta_truncation():
    d = delta_expand({"x1": 1, "x2": -1}, -2, 2)
    assert len(d) == 5 and all(d.coeff((k, -k)) == ONE for k in range(-2, 3))
    e = delta_expand({"x1": 1, "x2": -1}, 1, 1, ("y", -LAM, 4))
    ref = exp_series("y", -LAM, 4)
    assert all(e.coeff((1, -1, j)) == ref.coeff((j,)) for j in range(5))


@given(series(), series(), series())
@settings(max_examples=40, deadline=None)
def test_ring_axioms(a, b, c):
    assert mul(a, b) == mul(b, a)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, b + c) == mul(a, b) + mul(a, c)


@given(series())
@settings(max_examples=40, deadline=None)
def test_inverse(a):
    a = a + uni({0: 1})
    if not a.coeff((0,)):
        return
    inv = series_inverse(a, N)
    assert coeffs_of(mul(a, inv)) == [ONE] + [ZERO] * N


@given(tangent_series())
@settings(max_examples=30, deadline=None)
def test_composition_inverse_roundtrip(f):
    g = comp_inverse(f, N)
    assert coeffs_of(compose(f, g)) == coeffs_of(uni({1: 1}))
    assert coeffs_of(compose(g, f)) == coeffs_of(uni({1: 1}))


@given(series())
@settings(max_examples=30, deadline=None)
def test_json_roundtrip(a):
    assert MultiSeries.from_json(a.to_json()) == a
