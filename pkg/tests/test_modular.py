import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from voatorus.elliptic import eisenstein
from voatorus.fps import MultiSeries
from voatorus import modular
from voatorus.voa import build_lattice

S = (0, -1, 1, 0)
T = (1, 1, 0, 1)
LAT = build_lattice(1, 4)


def test_eval_constant():
    v, tail = modular.eval_series(MultiSeries.const(1, ("q",)), {"q": 0.3}, 1e-8)
    assert v == 1 and tail == 0


def test_eval_refuses_large_tail():
    q = cmath.exp(2j * math.pi * 0.05j)  # |q| close to 1
    with pytest.raises(modular.EvaluationError):
        modular.eval_series(eisenstein(2, 10), {"q": q}, 1e-8)


@pytest.mark.parametrize("tol", [0, 1, -1e-3, 2.0])
def test_tolerance_validation(tol):
    with pytest.raises(ValueError):
        modular.check_tol(tol)
    with pytest.raises(ValueError):
        modular.check_mod_transform("g4", S, [1j], tol)


def test_eval_point():
    p = modular.EvalPoint(1.5j, [0.3])
    assert abs(p.q - math.exp(-3 * math.pi)) < 1e-15
    with pytest.raises(ValueError):
        modular.EvalPoint(-1j)


def test_g4_lattice_oracle():
    v = modular.g_value(2, 2j)
    assert abs(v - modular.lattice_g4(2j)) < 1e-8
    # the plain square-truncated double sum converges only like 1/M^2
    assert abs(v - modular.lattice_eisenstein(2, 2j, 200)) < 1e-5


def test_wp2_lattice_oracle():
    assert abs(modular.wp_value(2, 0.3, 1.5j) - modular.lattice_wp2(0.3, 1.5j)) < 1e-6


@pytest.mark.parametrize("obj", ["g2", "g4", "g6", "g8"])
def test_identity_transform(obj):
    r = modular.check_mod_transform(obj, (1, 0, 0, 1), [0.1 + 1.3j], 1e-12)
    assert r.passed and max(r.details["residuals"]) < 1e-14


@pytest.mark.parametrize("obj", ["g2", "g4", "g6"])
def test_s_transform(obj):
    r = modular.check_mod_transform(obj, S, [0.1 + 1.3j], 1e-8, N_q=60)
    assert r.passed, r.to_json()


def test_g2_anomaly_is_needed():
    tau = 0.1 + 1.3j
    tp = -1 / tau
    bare = abs(modular.g_value(1, tp) - tau ** 2 * modular.g_value(1, tau))
    assert bare > 1


def test_wp_transform():
    assert modular.check_mod_transform("wp:2", S, [(0.3, 1.4j)], 1e-6).passed
    assert modular.check_mod_transform("wp:3", T, [(0.2, 1.2j)], 1e-6).passed


@pytest.mark.parametrize("m", [1, 2, 3])
def test_wp_p_link(m):
    assert modular.check_wp_P_link(m, [(0.2, 1.4j), (0.1 + 0.05j, 1.1j)], 1e-7).passed


def test_wp_parity():
    assert abs(modular.wp_value(2, -0.2, 1.4j) - modular.wp_value(2, 0.2, 1.4j)) < 1e-7


def test_p_outside_annulus():
    with pytest.raises(modular.EvaluationError):
        modular.p_value(2, 0.5j, 0.4j)


def test_residual_decreases_with_order():
    res = [modular.transform_residual("g4", S, 0.1 + 1.3j, N_q=n, tol=0.5) for n in (2, 4, 8, 16)]
    assert all(a >= b for a, b in zip(res, res[1:]))
    assert res[-1] < 1e-8 < res[0]


@given(st.floats(-0.5, 0.5), st.floats(1.0, 2.0), st.sampled_from([S, T, (1, 0, 1, 1), (0, 1, -1, 0)]))
@settings(max_examples=25, deadline=None)
def test_g4_g6_modular(x, y, g):
    tau = complex(x, y)
    tp = (g[0] * tau + g[1]) / (g[2] * tau + g[3])
    if tp.imag < 0.45:
        return
    for obj in ("g4", "g6"):
        assert modular.transform_residual(obj, g, tau, N_q=80, tol=1e-6) < 1e-7 * (1 + abs(g[2] * tau + g[3]) ** 6)


def test_characters_identity_and_t():
    M, r, rank, cond = modular.fit_transform([LAT.sector(0), LAT.sector(1)], (1, 0, 0, 1),
                                             modular.default_sclosure_points())
    assert np.allclose(M, np.eye(2), atol=1e-10)
    M, r, rank, cond = modular.fit_transform([LAT.sector(0), LAT.sector(1)], T, modular.default_sclosure_points())
    assert abs(M[0, 1]) < 1e-8 and abs(M[1, 0]) < 1e-8
    assert np.allclose(np.diag(M), modular.t_phases(LAT), atol=1e-8)


def test_characters_s_closure():
    r = modular.check_s_closure_characters(LAT)
    assert r.passed and r.details["residual"] < 1e-6 and r.compared >= 6
    # the fitted S matrix is the expected one for this lattice
    assert np.allclose(r.matrix, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-8)


def test_s_closure_point_region():
    with pytest.raises(ValueError):
        modular.check_s_closure_characters(LAT, points=[0.5j] * 6)
    with pytest.raises(ValueError):
        modular.check_s_closure_characters(LAT, N_q=20)


def test_character_coefficients_lattice2():
    L2 = build_lattice(2, 5)
    for j in range(4):
        W = L2.sector(j)
        assert modular.character_coefficients(W, 5) == [W.dim(n) for n in range(6)]
