from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from voatorus.coeff import LAM, ONE, ZERO, Scalar
from voatorus.voa import build_heisenberg, build_lattice, build_virasoro
from voatorus import trace

H = build_heisenberg(12)
VIR = build_virasoro(Fraction(1, 2), 12)
LAT = build_lattice(1, 10)
YH = H.vertex_map(H.V)
YV = VIR.vertex_map(VIR.V)
A = H.a()
OM = VIR.omega


def one_point(voa, W, w, N):
    T = trace.TraceSeries(trace.make_chain([voa.vertex_map(W)], [w]))
    return T, [T.coeff(m, (0,)) for m in range(N + 1)]


def test_heisenberg_character():
    T, c = one_point(H, H.V, H.vacuum(), 6)
    assert T.offset == Fraction(-1, 24)
    assert c == [Scalar.const(x) for x in (1, 1, 2, 3, 5, 7, 11)]


def test_virasoro_vacuum_character():
    V = build_virasoro(Fraction(3, 7), 8)
    T, c = one_point(V, V.V, V.vacuum(), 6)
    assert T.offset == -Fraction(3, 7) / 24
    assert c == [Scalar.const(x) for x in (1, 0, 1, 1, 2, 2, 4)]


def test_fock_leading_coefficient():
    mu = Fraction(1, 2)
    T, c = one_point(H, H.fock(mu), A, 3)
    assert T.offset == mu * mu / 2 - Fraction(1, 24)
    assert c[0] == LAM * Scalar.const(mu)
    assert c == trace.direct_one_point(H, H.fock(mu), A, 3)


@pytest.mark.parametrize("case", ["heis-fock-omega", "vir-verma", "lat-sector"])
def test_direct_oracle(case):
    if case == "heis-fock-omega":
        voa, W, w = H, H.fock(Fraction(1, 2)), H.omega
    elif case == "vir-verma":
        voa, W, w = VIR, VIR.verma(Fraction(1, 16)), OM
    else:
        voa, W, w = LAT, LAT.sector(1), LAT.omega
    assert one_point(voa, W, w, 6)[1] == trace.direct_one_point(voa, W, w, 6)


def test_identity0():
    assert trace.check_identity0(H, H.vacuum(), [YH, YH], [A, A]).passed
    assert trace.check_identity0(H, A, [YH, YH], [A, A], (4, 4)).passed
    assert trace.check_identity0(VIR, OM, [YV], [OM], (4, 4)).passed


def test_identity05():
    assert trace.check_identity05(H, H.vacuum(), [YH, YH], [A, A]).passed
    assert trace.check_identity05(H, A, [YH, YH], [A, A]).passed
    assert trace.check_identity05(VIR, OM, [YV], [OM]).passed


@pytest.mark.parametrize("j", [1, 2])
def test_identity1(j):
    assert trace.check_identity1(H, H.vacuum(), j, [YH, YH], [A, A]).passed
    assert trace.check_identity1(H, A, j, [YH, YH], [A, A], (4, 4, 3)).passed


def test_identity1_pi_sign():
    """With u = omega only +pi i in the P_1 correction is consistent."""
    assert trace.check_identity1(H, H.omega, 1, [YH, YH], [A, A], (3, 3, 3), pi_sign=1).passed
    assert not trace.check_identity1(H, H.omega, 1, [YH, YH], [A, A], (3, 3, 3), pi_sign=-1).passed


@pytest.mark.parametrize("j", [1, 2])
def test_identity2_kernel(j):
    assert trace.check_identity2(H, A, 2, j, [YH, YH], [A, A], (4, 4)).passed


def test_identity2_omega_and_mod_inv_der():
    assert trace.check_identity2(H, H.omega, 1, 1, [YH, YH], [A, A], (3, 3)).passed
    assert trace.check_mod_inv_der(H, 1, [YH, YH], [A, A], (3, 3)).passed
    assert trace.check_mod_inv_der(VIR, 1, [YV], [OM], (4, 2)).passed
    assert not trace.check_mod_inv_der(H, 1, [YH, YH], [A, A], (3, 3), pi_sign=1).passed


def test_l1_derivative_trace():
    S1 = LAT.sector(1)
    w1, w2 = ({s: ONE} for s in S1.basis(0))
    chain = [LAT.intertwiner(1, 0), LAT.intertwiner(1, 1)]
    assert trace.check_l1_derivative_trace(LAT, 1, chain, [w1, w2], (3, 2)).passed
    assert trace.check_l1_derivative_trace(LAT, 1, [LAT.vertex_map(S1)], [LAT.a()], (4, 2)).passed
    YM = VIR.vertex_map(VIR.verma(Fraction(1, 16)))
    assert trace.check_l1_derivative_trace(VIR, 2, [YM, YM], [OM, OM], (3, 2)).passed


def test_ode():
    assert trace.check_ode_n1(VIR, VIR.vacuum(), YV, 6).passed
    assert trace.check_ode_n1(VIR, OM, YV, 6).passed
    F = H.vertex_map(H.fock(Fraction(1, 2)))
    assert trace.check_ode_n1(H, {(Fraction(0), (1, 1)): ONE}, F, 6).passed
    assert trace.check_ode_n1(H, A, F, 6).passed


def test_cyclicity():
    assert trace.check_cyclicity([YH, YH], [A, A]).passed
    S1 = LAT.sector(1)
    w1, w2 = ({s: ONE} for s in S1.basis(0))
    assert trace.check_cyclicity([LAT.intertwiner(1, 0), LAT.intertwiner(1, 1)], [w1, w2], (3, 2)).passed


def test_truncation_is_flagged():
    small = build_heisenberg(3)
    Y = small.vertex_map(small.V)
    r = trace.check_identity0(small, small.a(), [Y, Y], [small.a(), small.a()], (6, 3))
    assert r.truncated and r.details["skipped_truncated"] > 0
    T = trace.TraceSeries(trace.make_chain([Y], [small.vacuum()]))
    with pytest.raises(trace.Truncated):
        T.coeff(6, (0,))


def test_chain_validation():
    with pytest.raises(ValueError):
        trace.make_chain([YH, YH], [A])
    with pytest.raises(ValueError):
        trace.TraceSeries(trace.make_chain([LAT.intertwiner(1, 0), LAT.vertex_map(LAT.V)],
                                           [{LAT.sector(1).basis(0)[0]: ONE}, LAT.a()]))


@given(st.integers(0, 6), st.sampled_from([0, 1, 2]))
@settings(max_examples=15, deadline=None)
def test_vacuum_insertion_is_trivial(m, g):
    """Inserting Y(U(x)1, x) = id leaves the trace unchanged."""
    w = {H.V.basis(g)[0]: ONE}
    T1 = trace.TraceSeries(trace.make_chain([YH], [w]))
    T2 = trace.TraceSeries(trace.make_chain([YH, YH], [H.vacuum(), w]))
    assert T2.coeff(m, (0, 0)) == T1.coeff(m, (0,))
    assert not T2.coeff(m, (1, -1))


@given(st.data())
@settings(max_examples=10, deadline=None)
def test_identity0_random_vectors(data):
    B = [{s: ONE} for s in VIR.V.basis_upto(2)]
    u = data.draw(st.sampled_from(B))
    ws = data.draw(st.lists(st.sampled_from(B), min_size=1, max_size=2))
    assert trace.check_identity0(VIR, u, [YV] * len(ws), ws, (3, 3)).passed
