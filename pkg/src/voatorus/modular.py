"""Numeric evaluation of truncated series and the modular transformation laws.

Series coefficients are exact elements of Q(lam); they are converted to complex
numbers at lam = 2 pi i and summed in double precision.  Every evaluation
carries a tail estimate (geometric extrapolation from the last two nonzero
slices of each truncated variable) and refuses to answer when that estimate
exceeds the tolerance.
"""
import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .checks import CheckResult
from .elliptic import eisenstein, wp_tilde

LAM_C = 2j * math.pi


class EvaluationError(ValueError):
    """A truncated series cannot be evaluated to the requested tolerance."""


@dataclass
class EvalPoint:
    tau: complex
    z: list = field(default_factory=list)
    tol: float = 1e-8

    def __post_init__(self):
        self.tau = complex(self.tau)
        if self.tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        check_tol(self.tol)

    @property
    def q(self):
        return cmath.exp(LAM_C * self.tau)


def check_tol(tol):
    if not (0 < tol < 1):
        raise ValueError("tolerance must lie in (0, 1), got %r" % (tol,))
    return tol


def _cval(c, cache):
    r = cache.get(c)
    if r is None:
        r = complex(c)
        cache[c] = r
    return r


def _tail(slices):
    """Geometric tail from {exponent: magnitude} of the last computed slices."""
    ks = sorted(k for k, v in slices.items() if v > 0)
    if len(ks) < 2:
        return 0.0
    k1, k2 = ks[-2], ks[-1]
    a, b = slices[k1], slices[k2]
    r = (b / a) ** (1.0 / (k2 - k1))
    if r >= 1:
        return math.inf
    return b * r / (1 - r)


def eval_series(s, values, tol=1e-8, offsets=None):
    """Value of a MultiSeries at {var: complex}; returns (value, tail estimate).

    offsets: optional {var: rational} multiplying by var**offset (principal branch)."""
    check_tol(tol)
    cache = {}
    total = 0j
    slices = {v: {} for i, v in enumerate(s.vars) if s.hi[i] is not None}
    for k, c in s.terms.items():
        t = _cval(c, cache)
        for v, e in zip(s.vars, k):
            t *= values[v] ** e
        total += t
        for i, v in enumerate(s.vars):
            if v in slices:
                slices[v][k[i]] = slices[v].get(k[i], 0.0) + abs(t)
    for v, o in (offsets or {}).items():
        total *= values[v] ** float(o)
    tail = sum(_tail(sl) for sl in slices.values())
    if not tail <= tol:
        raise EvaluationError("tail estimate %.3g exceeds tolerance %.3g" % (tail, tol))
    return total, tail


# Eisenstein series, wp_m and P_m ---------------------------------------------

def g_value(k, tau, N_q=60, tol=1e-10):
    """G_{2k}(tau) from the q-expansion."""
    return eval_series(eisenstein(k, N_q), {"q": cmath.exp(LAM_C * tau)}, tol)[0]


def wp_value(m, z, tau, N_y=40, N_q=40, tol=1e-10):
    """wp_m(z; tau) from the (y, q)-expansion of wp~_m."""
    s = wp_tilde(m, N_y, N_q).series
    return eval_series(s, {"y": complex(z), "q": cmath.exp(LAM_C * tau)}, tol)[0]


def p_value(m, z, tau, L=None, tol=1e-12):
    """P_m(q_z; q_tau) on the annulus |q_tau| < |q_z| < 1/|q_tau|.

    The part sum_l l^{m-1} x^l is the polylogarithm Li_{1-m}(x) (analytic
    continuation to |x| = 1); the remainder
      sum_l l^{m-1} (x^l q^l - (-1)^{m-1} q^l x^{-l}) / (1 - q^l)
    converges geometrically on the annulus."""
    x = cmath.exp(LAM_C * z)
    q = cmath.exp(LAM_C * tau)
    if not abs(q) < abs(x) < 1 / abs(q):
        raise EvaluationError("q_z outside the annulus |q| < |q_z| < 1/|q|")
    head = complex(mpmath.polylog(1 - m, x))
    sgn = (-1) ** (m - 1)
    rest = 0j
    l = 1
    prev = None
    while True:
        ql = q ** l
        term = l ** (m - 1) * (x ** l * ql - sgn * ql * x ** (-l)) / (1 - ql)
        rest += term
        if abs(term) < tol * 1e-3 and prev is not None and abs(prev) < tol:
            break
        prev = term
        l += 1
        if L is not None and l > L:
            break
        if l > 100000:
            raise EvaluationError("P_m remainder does not converge")
    return LAM_C ** m / math.factorial(m - 1) * (head + rest)


def wp_p_link_value(m, z, tau):
    """(-1)^m (P_m(q_z; q) - d^{m-1}/dz^{m-1} (G~_2(q) z - pi i))."""
    p = p_value(m, z, tau)
    if m == 1:
        corr = g_value(1, tau) * z - 1j * math.pi
    elif m == 2:
        corr = g_value(1, tau)
    else:
        corr = 0
    return (-1) ** m * (p - corr)


# lattice-sum oracles ------------------------------------------------------

def lattice_eisenstein(k, tau, M=200):
    """sum' 1/(m tau + l)^{2k} over |m|, |l| <= M (absolutely convergent for k >= 2).

    Slowly convergent; lattice_g4 is the sharper oracle for weight 4."""
    m = np.arange(-M, M + 1)
    w = m[:, None] * complex(tau) + m[None, :]
    w[M, M] = 1.0
    vals = w ** (-2 * k)
    vals[M, M] = 0
    return complex(vals.sum())


def _row_sums(tau, f, m0, tol=1e-18):
    """sum over m != 0 of f(m tau), stopping once the terms are negligible."""
    s = 0j
    for m in range(1, 10000):
        t = f(m * tau) + f(-m * tau)
        s += t
        if abs(t) < tol:
            return s
    raise EvaluationError("lattice sum does not converge")


def lattice_g4(tau):
    """sum' (m tau + l)^{-4}: the l-sum of each lattice row in closed form,
    sum_l (w + l)^{-4} = pi^4 csc^2(pi w) (3 csc^2(pi w) - 2) / 3."""
    pi = math.pi
    tau = complex(tau)

    def row(w):
        c2 = 1 / cmath.sin(pi * w) ** 2
        return pi ** 4 * c2 * (3 * c2 - 2) / 3

    return pi ** 4 / 45 + _row_sums(tau, row, 0)


def lattice_wp2(z, tau):
    """wp(z; tau) = sum_m pi^2/sin^2(pi(z + m tau)) - G_2(tau), the l-sum of each
    lattice row in closed form and G_2 summed in the same (Eisenstein) order."""
    z, tau = complex(z), complex(tau)
    pi = math.pi
    s = (pi / cmath.sin(pi * z)) ** 2 - pi ** 2 / 3
    return s + _row_sums(tau, lambda w: (pi / cmath.sin(pi * (z + w))) ** 2 - (pi / cmath.sin(pi * w)) ** 2, 0)


# transformation laws ------------------------------------------------------

def _mobius(g, tau):
    a, b, c, d = g
    if a * d - b * c != 1:
        raise ValueError("gamma must have determinant 1")
    return (a * tau + b) / (c * tau + d), c * tau + d


def parse_object(name):
    name = name.lower()
    if name == "g2":
        return ("G", 1)
    if name.startswith("g") and name[1:].isdigit():
        k2 = int(name[1:])
        if k2 % 2 or k2 < 2:
            raise ValueError("Eisenstein weight must be even and >= 2")
        return ("G", k2 // 2)
    if name.startswith("wp:"):
        return ("wp", int(name[3:]))
    raise ValueError("unknown object %r" % (name,))


def transform_residual(obj, g, tau, z=None, N_q=60, N_y=40, tol=1e-10):
    """|f(gamma tau) - (law applied to f(tau))| for one point."""
    kind, k = parse_object(obj) if isinstance(obj, str) else obj
    tp, j = _mobius(g, tau)
    c = g[2]
    if kind == "G":
        lhs = g_value(k, tp, N_q, tol)
        rhs = j ** (2 * k) * g_value(k, tau, N_q, tol)
        if k == 1:
            rhs -= LAM_C * c * j
    else:
        if z is None:
            raise ValueError("wp needs a z value")
        lhs = wp_value(k, z / j, tp, N_y, N_q, tol)
        rhs = j ** k * wp_value(k, z, tau, N_y, N_q, tol)
    return abs(lhs - rhs)


def check_mod_transform(obj, g, points, tol, N_q=60, N_y=40):
    """points: list of tau or (z, tau)."""
    check_tol(tol)
    res = CheckResult("mod_transform", "modular transformation law of %s" % obj, True,
                      {"N_q": N_q, "N_y": N_y}, details={"gamma": list(g), "residuals": []})
    for p in points:
        z, tau = (p if isinstance(p, tuple) else (None, p))
        try:
            r = transform_residual(obj, g, complex(tau), None if z is None else complex(z), N_q, N_y,
                                   min(tol / 100, 1e-10))
        except EvaluationError as exc:
            res.passed = False
            res.details["residuals"].append(None)
            if res.first_mismatch is None:
                res.first_mismatch = {"point": str(p), "error": str(exc)}
            continue
        res.compared += 1
        res.details["residuals"].append(r)
        if not r < tol:
            res.passed = False
            if res.first_mismatch is None:
                res.first_mismatch = {"point": str(p), "residual": r}
    return res


def check_wp_P_link(m, points, tol, N_q=60, N_y=40):
    """wp~_m(z; q) against (-1)^m (P_m(q_z; q) - d^{m-1}(G~_2 z - pi i)); points are (z, tau)."""
    check_tol(tol)
    res = CheckResult("wp_P_link", "wp~_m through P_m and the G~_2 z - pi i correction", True,
                      {"N_q": N_q, "N_y": N_y}, details={"m": m, "residuals": []})
    for z, tau in points:
        z, tau = complex(z), complex(tau)
        try:
            r = abs(wp_value(m, z, tau, N_y, N_q, min(tol / 100, 1e-10)) - wp_p_link_value(m, z, tau))
        except EvaluationError as exc:
            res.passed = False
            if res.first_mismatch is None:
                res.first_mismatch = {"point": str((z, tau)), "error": str(exc)}
            continue
        res.compared += 1
        res.details["residuals"].append(r)
        if not r < tol:
            res.passed = False
            if res.first_mismatch is None:
                res.first_mismatch = {"point": str((z, tau)), "residual": r}
    return res


# characters of lattice:1 --------------------------------------------------

def _partition_counts(n):
    p = [0] * (n + 1)
    p[0] = 1
    for part in range(1, n + 1):
        for k in range(part, n + 1):
            p[k] += p[k - part]
    return p


def character_coefficients(W, N_q):
    """dim W_(m) for m <= N_q, from the charges of a Fock-type module and partitions."""
    p = _partition_counts(N_q)
    out = [0] * (N_q + 1)
    for ch in W.charges_upto(N_q):
        g = W.charge_weight(ch) - W.h
        if g.denominator != 1 or g > N_q:
            continue
        for m in range(int(g), N_q + 1):
            out[m] += p[m - int(g)]
    return out


def character_value(W, tau, N_q=40, tol=1e-12):
    """Tr_W q^{L(0) - c/24} at tau."""
    q = cmath.exp(LAM_C * tau)
    coeffs = character_coefficients(W, N_q)
    s = 0j
    slices = {}
    for m, c in enumerate(coeffs):
        t = c * q ** m
        s += t
        slices[m] = abs(t)
    tail = _tail(slices)
    if not tail <= tol:
        raise EvaluationError("character tail %.3g exceeds %.3g" % (tail, tol))
    expo = W.h - W.c / 24
    return s * cmath.exp(LAM_C * tau * float(expo))


def default_sclosure_points():
    """Six points with Im tau >= 0.75 and Im(-1/tau) >= 0.75."""
    return [1j, 0.1 + 1.0j, -0.15 + 0.95j, 0.25 + 1.1j, -0.3 + 1.05j, 0.05 + 0.85j]


def fit_transform(modules, g, points, N_q=40):
    """Least-squares M with chi_i(gamma tau) = sum_j M_ij chi_j(tau) (weight 0)."""
    rows_src = []
    rows_tgt = []
    for tau in points:
        tau = complex(tau)
        tp, _ = _mobius(g, tau)
        rows_src.append([character_value(W, tau, N_q) for W in modules])
        rows_tgt.append([character_value(W, tp, N_q) for W in modules])
    A = np.array(rows_src)
    B = np.array(rows_tgt)
    M, _, rank, sv = np.linalg.lstsq(A, B, rcond=None)
    resid = np.abs(A @ M - B)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    return M.T, float(resid.max()), int(rank), cond


def check_s_closure_characters(voa, g=(0, -1, 1, 0), points=None, tol=1e-6, N_q=40):
    """The transformed characters of the lattice sectors lie in their span."""
    check_tol(tol)
    if N_q < 40:
        raise ValueError("characters are needed to q-order >= 40")
    points = points or default_sclosure_points()
    mods = [voa.sector(j) for j in range(2 * voa.N)]
    res = CheckResult("s_closure", "transformed characters lie in the span of the characters", True,
                      {"N_q": N_q}, details={"gamma": list(g), "points": [str(p) for p in points]})
    for tau in points:
        tp, _ = _mobius(g, complex(tau))
        if min(complex(tau).imag, tp.imag) < 0.75 - 1e-12:
            raise ValueError("sample point %s leaves the region Im >= 0.75" % tau)
    M, r, rank, cond = fit_transform(mods, g, points, N_q)
    res.compared = len(points)
    res.details.update({"residual": r, "rank": rank, "condition": cond,
                        "matrix": [[[float(x.real), float(x.imag)] for x in row] for row in M]})
    if rank < len(mods) or cond > 1e8:
        res.passed = False
        res.first_mismatch = {"reason": "ill-conditioned fit", "condition": cond}
    elif not r < tol:
        res.passed = False
        res.first_mismatch = {"residual": r}
    res.matrix = M
    return res


def t_phases(voa):
    """exp(2 pi i (h - c/24)) for each sector: the expected T matrix."""
    return [cmath.exp(LAM_C * float(voa.sector(j).h - voa.c / 24)) for j in range(2 * voa.N)]
