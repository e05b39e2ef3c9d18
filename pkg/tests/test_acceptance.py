"""One test per acceptance criterion; each records a PASS/FAIL summary line."""
import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np

from voatorus.coeff import LAM, ONE, Scalar
from voatorus.elliptic import cubic_residual, eisenstein_reduce, reduce_to_R
from voatorus.fps import exp_derivation_coeffs, log1p_series
from voatorus.geomod import apply_u1, check_chg_var, check_l1_derivative_op, check_x_comm, svec
from voatorus.linalg import vadd
from voatorus.voa import build_heisenberg, build_lattice, build_virasoro
from voatorus import modular, trace, zhu


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_c01_exact_coefficients(criterion):
    c, dt = _timed(lambda: exp_derivation_coeffs(log1p_series("y", LAM, 6), 2))
    # A_1 = -pi i = -lam/2 and A_2 = -pi^2/3 = lam^2/12
    ok = list(c) == [-LAM / 2, LAM ** 2 / 12]
    ok = ok and abs(complex(c[1]) - (-1j * math.pi)) < 1e-15 and abs(complex(c[2]) + math.pi ** 2 / 3) < 1e-13
    criterion(1, ok and dt < 1, "c1=%s c2=%s (%.3fs)" % (c[1], c[2], dt))
    assert ok and dt < 1


def test_c02_u1_omega(criterion):
    t0 = time.perf_counter()
    ok = True
    for voa in (build_virasoro(Fraction(1, 2), 4), build_virasoro(1, 4), build_heisenberg(4)):
        rhs = vadd({s: LAM ** 2 * x for s, x in svec(voa.omega).items()}, voa.vacuum(),
                   -(LAM ** 2) * Scalar.const(voa.c) / 24)
        ok = ok and apply_u1(voa.V, voa.omega) == rhs
    dt = time.perf_counter() - t0
    criterion(2, ok and dt < 1, "Virasoro c=1/2, c=1 and Heisenberg (%.3fs)" % dt)
    assert ok and dt < 1


def test_c03_operator_identities(criterion):
    t0 = time.perf_counter()
    results = []
    H = build_heisenberg(6)
    YH = H.vertex_map(H.V)
    VIR = build_virasoro(Fraction(1, 2), 6)
    YV = VIR.vertex_map(VIR.V)
    for voa, Y, w in ((H, YH, H.a()), (VIR, YV, VIR.omega)):
        results.append(check_chg_var(Y, w, 5, 5))
        results.append(check_x_comm(voa, Y, w, w, (4, 4), 5))
        results.append(check_l1_derivative_op(Y, w, 5, 5))
    I = H.intertwiner(Fraction(1, 2), Fraction(1))
    results.append(check_l1_derivative_op(I, {I.src.basis(0)[0]: ONE}, 5, 5))
    dt = time.perf_counter() - t0
    ok = all(r.passed for r in results) and dt < 60
    criterion(3, ok, "%d checks, cutoff 5, windows (4,4) (%.1fs)" % (len(results), dt))
    assert ok


def test_c04_trace_identities(criterion):
    lines = []
    ok = True
    for name, voa in (("heisenberg", build_heisenberg(12)), ("virasoro 1/2", build_virasoro(Fraction(1, 2), 12))):
        t0 = time.perf_counter()
        Y = voa.vertex_map(voa.V)
        B = [{s: ONE} for s in voa.V.basis_upto(2)]
        n_checks = bad = 0
        for n in (1, 2):
            for u in B:
                for ws in itertools.product(B, repeat=n):
                    rs = [trace.check_identity0(voa, u, [Y] * n, list(ws), (4, 4)),
                          trace.check_identity05(voa, u, [Y] * n, list(ws), (4, 4))]
                    if n == 2:
                        rs += [trace.check_identity1(voa, u, j, [Y, Y], list(ws), (4, 4, 3)) for j in (1, 2)]
                    n_checks += len(rs)
                    bad += sum(not r.passed or r.truncated for r in rs)
        dt = time.perf_counter() - t0
        ok = ok and bad == 0 and dt < 300
        lines.append("%s: %d checks, %d failed (%.1fs)" % (name, n_checks, bad, dt))
    criterion(4, ok, "; ".join(lines))
    assert ok


def test_c05_weierstrass_eisenstein(criterion):
    t0 = time.perf_counter()
    ok = cubic_residual(10, 8).is_zero()
    polys = [eisenstein_reduce(k, 12) for k in (4, 5, 6)]
    polys += [reduce_to_R(m, (10, 8)) for m in (4, 5, 6)]
    dt = time.perf_counter() - t0
    ok = ok and dt < 60
    criterion(5, ok, "cubic exact at (10,8); G8=%s, G10=%s, G12=%s; wp4..wp6 verified (%.2fs)"
              % (polys[0], polys[1], polys[2], dt))
    assert ok


def test_c06_kernel_property(criterion):
    t0 = time.perf_counter()
    H = build_heisenberg(12)
    Y = H.vertex_map(H.V)
    a = H.a()
    B = [{s: ONE} for s in H.V.basis_upto(1)]
    rs = []
    for ws in itertools.product(B, repeat=2):
        for j in (1, 2):
            rs.append(trace.check_identity2(H, a, 2, j, [Y, Y], list(ws), (4, 4)))
    rs.append(trace.check_identity2(H, H.omega, 1, 1, [Y, Y], [a, a], (4, 4)))
    rs.append(trace.check_mod_inv_der(H, 1, [Y, Y], [a, a], (4, 3)))
    VIR = build_virasoro(Fraction(1, 2), 12)
    YV = VIR.vertex_map(VIR.V)
    rs.append(trace.check_identity2(VIR, VIR.omega, 1, 1, [YV], [VIR.omega], (4, 4)))
    rs.append(trace.check_mod_inv_der(VIR, 1, [YV], [VIR.omega], (4, 3)))
    dt = time.perf_counter() - t0
    ok = all(r.passed and not r.truncated for r in rs) and dt < 300
    criterion(6, ok, "%d checks incl. l=2 (both j) and l=1 u=omega / mod-inv-der (%.1fs)" % (len(rs), dt))
    assert ok


def _algebra_suite(voa, M):
    q = zhu.a_tilde(voa, M)
    return [zhu.check_associativity(voa, q), zhu.commutator_check(voa, q, form="printed"),
            zhu.commutator_check(voa, q), zhu.centrality_check(voa, q), zhu.l1_check(voa, q),
            zhu.iso_check(voa, M, qt=q)], q


def test_c07_algebra(criterion):
    t0 = time.perf_counter()
    VIR = build_virasoro(Fraction(1, 2), 6)
    rv, qv = _algebra_suite(VIR, 6)
    rh, _ = _algebra_suite(build_heisenberg(4), 4)
    rank = zhu.omega_powers_rank(VIR, qv, 3)
    dt = time.perf_counter() - t0
    failed = [r.name for r in rv + rh if not r.passed]
    ok = not failed and rank == 4 and dt < 300
    criterion(7, ok, "Virasoro cutoff 6 and Heisenberg cutoff 4; rank{[omega]^k, k<=3}=%d; failed=%s (%.1fs)"
              % (rank, failed, dt))
    assert ok


def test_c08_ode(criterion):
    t0 = time.perf_counter()
    VIR = build_virasoro(Fraction(1, 2), 12)
    YV = VIR.vertex_map(VIR.V)
    H = build_heisenberg(12)
    a = H.a()
    rs = [trace.check_ode_n1(VIR, w, YV, 6) for w in (VIR.vacuum(), VIR.omega)]
    for W in (H.V, H.fock(Fraction(1, 2)), H.fock(1)):
        rs += [trace.check_ode_n1(H, w, H.vertex_map(W), 6) for w in (H.vacuum(), a)]
    ok = all(r.passed and r.details.get("z_independent") and not r.truncated for r in rs)
    dt = time.perf_counter() - t0
    criterion(8, ok, "%d instances, q-order 6, z-independence held (%.1fs)" % (len(rs), dt))
    assert ok


def test_c09_numeric_modular(criterion):
    S = (0, -1, 1, 0)
    parts = []
    ok = True
    for obj in ("g4", "g6", "g2"):
        r, dt = _timed(lambda: modular.check_mod_transform(obj, S, [0.1 + 1.3j], 1e-8, N_q=60))
        ok = ok and r.passed and dt < 10
        parts.append("%s %.1e" % (obj, r.details["residuals"][0]))
    r, dt = _timed(lambda: modular.check_mod_transform("wp:2", S, [(0.3, 1.4j)], 1e-6))
    ok = ok and r.passed and dt < 10
    parts.append("wp2 %.1e" % r.details["residuals"][0])
    for m in (1, 2):
        r, dt = _timed(lambda: modular.check_wp_P_link(m, [(0.2, 1.4j)], 1e-7))
        ok = ok and r.passed and dt < 10
        parts.append("link m=%d %.1e" % (m, r.details["residuals"][0]))
    criterion(9, ok, ", ".join(parts))
    assert ok


def test_c10_character_closure(criterion):
    L = build_lattice(1, 4)
    pts = modular.default_sclosure_points()
    r = modular.check_s_closure_characters(L, (0, -1, 1, 0), pts, tol=1e-6)
    M, _, _, _ = modular.fit_transform([L.sector(0), L.sector(1)], (1, 1, 0, 1), pts)
    off = max(abs(M[0, 1]), abs(M[1, 0]))
    diag = np.max(np.abs(np.diag(M) - np.array(modular.t_phases(L))))
    ok = r.passed and r.details["residual"] < 1e-6 and len(pts) >= 6 and off < 1e-8 and diag < 1e-8
    criterion(10, ok, "S residual %.1e over %d points, T off-diagonal %.1e, phase error %.1e"
              % (r.details["residual"], len(pts), off, diag))
    assert ok


def test_c11_oracle_parity(criterion):
    rng = random.Random(2024)
    H = build_heisenberg(6)
    VIR = build_virasoro(Fraction(1, 2), 6)
    L = build_lattice(1, 6)
    bad = 0
    for k in range(50):
        voa = (H, VIR, L)[k % 3]
        B = voa.V.basis_upto(3)
        u, v = {rng.choice(B): ONE}, {rng.choice(B): ONE}
        bad += zhu.bullet(voa, u, v) != zhu.bullet_oracle(voa, u, v)
    H12 = build_heisenberg(12)
    V12 = build_virasoro(Fraction(1, 2), 12)
    L12 = build_lattice(1, 12)
    cases = [(H12, H12.V, H12.vacuum()), (H12, H12.fock(Fraction(1, 2)), H12.a()),
             (H12, H12.fock(Fraction(1, 2)), H12.omega), (V12, V12.V, V12.omega),
             (V12, V12.verma(Fraction(1, 16)), V12.omega), (L12, L12.sector(1), L12.omega)]
    tbad = 0
    for voa, W, w in cases:
        T = trace.TraceSeries(trace.make_chain([voa.vertex_map(W)], [w]))
        tbad += [T.coeff(m, (0,)) for m in range(7)] != trace.direct_one_point(voa, W, w, 6)
    ok = bad == 0 and tbad == 0
    criterion(11, ok, "bullet: %d/50 mismatches; traces: %d/%d mismatches to q-order 6" % (bad, tbad, len(cases)))
    assert ok
