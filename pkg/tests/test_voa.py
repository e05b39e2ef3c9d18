from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from voatorus.coeff import ONE, Scalar
from voatorus.linalg import vadd
from voatorus.voa import build, build_heisenberg, build_lattice, build_virasoro

H = build_heisenberg(6)
VIR = build_virasoro(Fraction(1, 2), 6)
LAT = build_lattice(1, 6)


def gbinom(m, i):
    out = Fraction(1)
    for k in range(i):
        out = out * (m - k) / (k + 1)
    return out


def test_dimensions():
    assert [H.V.dim(n) for n in range(6)] == [1, 1, 2, 3, 5, 7]
    assert [build_virasoro(Fraction(3, 7), 6).V.dim(n) for n in range(7)] == [1, 0, 1, 1, 2, 2, 4]
    assert LAT.V.dim(1) == 3
    assert LAT.sector(1).h == Fraction(1, 4)


def test_lattice_character_counts():
    from voatorus.modular import character_coefficients
    for j in (0, 1):
        W = LAT.sector(j)
        assert character_coefficients(W, 5) == [W.dim(n) for n in range(6)]


def test_simple_actions():
    V = H.V
    a = H.a()
    assert V.L(0, a) == {k: Scalar.const(1) * c for k, c in a.items()}
    om = VIR.omega
    assert VIR.V.L(2, om) == {VIR.V.basis(0)[0]: Scalar.const(VIR.c / 2)}
    Y = H.vertex_map(V)
    w = {V.basis(3)[1]: ONE}
    assert Y.apply(H.vacuum(), -1, w) == w
    for s in V.basis(3):
        assert Y.apply(H.omega, 1, {s: ONE}) == {s: Scalar.const(3)}
    F = H.fock(Fraction(1, 2))
    low = {F.basis(0)[0]: ONE}
    assert H.vertex_map(F).apply(a, 0, low) == {F.basis(0)[0]: Scalar.const(Fraction(1, 2))}


def test_heisenberg_intertwiner_leading_exponent():
    mu, nu = Fraction(1, 2), Fraction(1)
    I = H.intertwiner(mu, nu)
    lo1, lo2 = {I.src.basis(0)[0]: ONE}, {I.mid.basis(0)[0]: ONE}
    # Y(e^mu, x) e^nu = x^{mu nu} (e^{mu+nu} + ...): the mode with index -mu*nu-1
    out = I.apply(lo1, -mu * nu - 1, lo2)
    assert out == {I.tgt.basis(0)[0]: ONE}
    assert not I.apply(lo1, -mu * nu, lo2)


def _states(W, g):
    return [s for n in range(g + 1) for s in W.basis(n)]


def _commutator_holds(voa, W, u, v, w, m, n):
    Y = voa.vertex_map(W)
    YV = voa.vertex_map(voa.V)
    lhs = vadd(Y.apply(u, m, Y.apply(v, n, w)), Y.apply(v, n, Y.apply(u, m, w)), -1)
    rhs = {}
    i = 0
    while True:
        uv = YV.apply(u, i, v)
        if not uv and i > 6:
            break
        if uv:
            rhs = vadd(rhs, Y.apply(uv, m + n - i, w), Scalar.const(gbinom(m, i)))
        i += 1
    return lhs == rhs


CASES = [(H, H.V), (H, H.fock(Fraction(1, 2))), (VIR, VIR.V), (VIR, VIR.verma(Fraction(1, 16))),
         (LAT, LAT.V), (LAT, LAT.sector(1))]


@given(st.integers(0, len(CASES) - 1), st.data(), st.integers(-2, 2), st.integers(-2, 2))
@settings(max_examples=80, deadline=None)
def test_commutator_formula(idx, data, m, n):
    voa, W = CASES[idx]
    u = {data.draw(st.sampled_from(_states(voa.V, 2))): ONE}
    v = {data.draw(st.sampled_from(_states(voa.V, 2))): ONE}
    w = {data.draw(st.sampled_from(_states(W, 2))): ONE}
    assert _commutator_holds(voa, W, u, v, w, m, n)


@given(st.integers(0, len(CASES) - 1), st.data(), st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_l_minus1_derivative(idx, data, n):
    """(L(-1)u)_n = -n u_{n-1}."""
    voa, W = CASES[idx]
    Y = voa.vertex_map(W)
    u = {data.draw(st.sampled_from(_states(voa.V, 2))): ONE}
    w = {data.draw(st.sampled_from(_states(W, 2))): ONE}
    lu = voa.V.L(-1, u)
    assert Y.apply(lu, n, w) == {k: c * Scalar.const(-n) for k, c in Y.apply(u, n - 1, w).items() if n}


@pytest.mark.parametrize("j1,j2", [(0, 1), (1, 0), (1, 1)])
def test_lattice_intertwiner_l_minus1(j1, j2):
    I = LAT.intertwiner(j1, j2)
    W1 = I.src
    for s in _states(W1, 1):
        u = {s: ONE}
        lu = W1.L(-1, u)
        for t in _states(I.mid, 1):
            for n in (Fraction(-3, 2), Fraction(-1, 2), Fraction(1, 2), -1, 0):
                lhs = I.apply(lu, n, {t: ONE})
                rhs = I.apply(u, n - 1, {t: ONE})
                assert lhs == {k: c * Scalar.const(-n) for k, c in rhs.items() if n}


def test_build_kinds():
    assert build("lattice:2", 3).N == 2
    with pytest.raises(ValueError):
        build("monster", 3)
