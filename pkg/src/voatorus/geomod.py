"""The geometrically-modified operator U(x) = (lam x)^{L(0)} exp(-L_+(A)).

U(x)w is stored as a ModifiedVector: the homogeneous components v_s of
exp(-L_+(A)) w, so that U(x)w = sum_s (lam x)^s v_s.  For a module whose
lowest weight h is fractional the common factor lam^{frac(h)} is dropped;
every identity checked here is homogeneous in these dropped factors, and
both sides drop the same total power.
"""
from fractions import Fraction
from functools import lru_cache
from math import factorial

from gmpy2 import mpq

from .checks import CheckResult, vec_str
from .coeff import LAM, ONE, ZERO, Scalar, coerce, lam_pow
from .fps import exp_derivation_coeffs, log1p_series
from .linalg import vadd


@lru_cache(maxsize=None)
def a_coeffs(count):
    """A_1..A_count from (1/lam) log(1 + lam y) = exp(sum A_j y^{j+1} d/dy) y."""
    f = log1p_series("y", LAM, count + 1)
    return tuple(exp_derivation_coeffs(f, count))


@lru_cache(maxsize=None)
def b_coeffs(count):
    """B_1..B_count, the rational version (A_j = lam^j B_j)."""
    f = log1p_series("y", ONE, count + 1)
    return tuple(c.rational() for c in exp_derivation_coeffs(f, count))


def svec(v):
    return {s: coerce(c) for s, c in v.items() if c}


def _frac(x):
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def exp_lplus(W, v, sign=-1, coeffs=None):
    """exp(sign * sum_j c_j L(j)) v, with c = A by default."""
    v = svec(v)
    if not v:
        return {}
    top = max(W.grade(s) for s in v)
    if top <= 0:
        return dict(v)
    coeffs = coeffs if coeffs is not None else a_coeffs(int(top))
    out = dict(v)
    term = v
    k = 0
    while term:
        k += 1
        nxt = {}
        for j in range(1, len(coeffs) + 1):
            c = coeffs[j - 1] * sign
            if not c:
                continue
            nxt = vadd(nxt, W.L(j, term), c)
        term = {s: c / k for s, c in nxt.items()}
        out = vadd(out, term)
    return out


class ModifiedVector:
    """U(x)w as components: weight s -> vector v_s, meaning sum_s (lam x)^s v_s."""

    def __init__(self, module, components):
        self.module = module
        self.components = components

    def at_one(self):
        """U(1)w (with lam^{frac h} dropped)."""
        out = {}
        fr = self.module.frac
        for s, v in self.components.items():
            out = vadd(out, v, lam_pow(int(s - fr)))
        return out

    def scaled(self, c):
        """U(c x) = c^{L(0)} U(x) for rational c > 0 with integral weights."""
        comps = {}
        for s, v in self.components.items():
            if _frac(s):
                raise ValueError("rescaling needs integral weights")
            comps[s] = {k: x * mpq(c) ** int(s) for k, x in v.items()}
        return ModifiedVector(self.module, comps)

    def x_coefficient(self, s):
        """Coefficient of x^s: lam^{s - frac} v_s."""
        v = self.components.get(Fraction(s), {})
        return {k: x * lam_pow(int(Fraction(s) - self.module.frac)) for k, x in v.items()}

    def __repr__(self):
        return "ModifiedVector(%s)" % ", ".join("%s: %s" % (s, vec_str(v)) for s, v in sorted(self.components.items()))


def apply_u(W, w):
    return ModifiedVector(W, W.homogeneous_parts(exp_lplus(W, w, -1)))


def apply_u1(W, w):
    return apply_u(W, w).at_one()


def apply_u1_inverse(W, w):
    """exp(L_+(A)) lam^{-L(0)} w."""
    out = {}
    for r, v in W.homogeneous_parts(svec(w)).items():
        scaled = {s: c * lam_pow(-int(r - W.frac)) for s, c in v.items()}
        out = vadd(out, exp_lplus(W, scaled, +1))
    return out


# change of variables --------------------------------------------------------

@lru_cache(maxsize=None)
def _log_g(K):
    """Coefficients of log((e^t - 1)/t) up to t^K."""
    # g = sum t^n/(n+1)!, log g via g'/g
    g = [mpq(1, factorial(n + 1)) for n in range(K + 2)]
    dg = [g[n + 1] * (n + 1) for n in range(K + 1)]
    q = [mpq(0)] * (K + 1)  # q = g'/g
    for n in range(K + 1):
        s = dg[n]
        for j in range(1, n + 1):
            s -= g[j] * q[n - j]
        q[n] = s
    out = [mpq(0)] * (K + 1)
    for n in range(1, K + 1):
        out[n] = q[n - 1] / n
    return tuple(out)


def _exp_coeffs(a, K):
    """exp(sum_{n>=1} a[n] t^n) to t^K."""
    b = [mpq(0)] * (K + 1)
    b[0] = mpq(1)
    for n in range(1, K + 1):
        s = mpq(0)
        for k in range(1, n + 1):
            if a[k]:
                s += k * a[k] * b[n - k]
        b[n] = s / n
    return b


@lru_cache(maxsize=None)
def chg_var_kernel(r, s, K):
    """[t^k] e^{r t} ((e^t - 1)/t)^s for k = 0..K (r, s rational)."""
    lg = _log_g(K)
    a = [mpq(0)] * (K + 1)
    for n in range(1, K + 1):
        a[n] = mpq(s) * lg[n]
    if K >= 1:
        a[1] += mpq(r)
    return tuple(_exp_coeffs(a, K))


def _modified_x_coeff(Y, mv, e, b):
    """[x^e] Y(U(x)w, x) b for a ModifiedVector mv of w: sum_s lam^{s-frac} Y_{s-1-e}(v_s) b."""
    out = {}
    fr = mv.module.frac
    for s, v in mv.components.items():
        n = s - 1 - Fraction(e)
        r = Y.apply(v, n, b)
        if r:
            out = vadd(out, r, lam_pow(int(s - fr)))
    return out


def modified_coefficient(Y, w, e, b):
    """[x^e] of Y(U(x)w, x) applied to the vector b."""
    return _modified_x_coeff(Y, apply_u(Y.src, w), e, b)


def _x_offset(Y):
    return _frac(Y.tgt.h - Y.src.h - Y.mid.h)


def _mismatch(check, key, lhs, rhs):
    if check.first_mismatch is None:
        check.first_mismatch = {"at": str(key), "lhs": vec_str(lhs), "rhs": vec_str(rhs)}
    check.passed = False


def check_chg_var(Y, w, cutoff=5, order=5):
    """U(1) Y(w, x) U(1)^{-1} = Y(U(e^{lam x}) w, e^{lam x} - 1) on W2 basis vectors."""
    W1, W2, W3 = Y.src, Y.mid, Y.tgt
    res = CheckResult("chg_var", "conjugation of an intertwining operator by U(1)", True,
                      {"cutoff": cutoff, "order": order})
    w = svec(w)
    parts = W1.homogeneous_parts(w)
    mv = apply_u(W1, w)
    drop = W3.frac - W1.frac - W2.frac
    for g in range(cutoff + 1):
        for b in W2.basis(g):
            wb = W2.weight(b)
            binv = W2.homogeneous_parts(apply_u1_inverse(W2, {b: 1}))
            wmax = max(parts) if parts else 0
            e_lo = W3.h - wmax - wb
            for i in range(order + 1):
                e = e_lo + i
                n = -e - 1
                lhs = {}
                for _, bv in binv.items():
                    lhs = vadd(lhs, Y.apply(w, n, bv))
                lhs = apply_u1(W3, lhs)
                rhs = {}
                for r, v in mv.components.items():
                    lam_r = r - W1.frac
                    s = W3.h - r - wb
                    s = s + _frac(e - s)  # same class as e
                    while s <= e:
                        k = int(e - s)
                        coef = chg_var_kernel(Fraction(r), s, k)[k]
                        if coef:
                            out = Y.apply(v, -s - 1, {b: 1})
                            if out:
                                rhs = vadd(rhs, out, lam_pow(int(lam_r + e - drop)) * coef)
                        s += 1
                res.compared += 1
                if lhs != rhs:
                    _mismatch(res, (b, e), lhs, rhs)
                    return res
    return res


def check_x_comm(voa, Y, u, w, windows=(4, 4), cutoff=3):
    """[Y(U(x1)u, x1), Y(U(x2)w, x2)] = lam Res_y delta(x1/(e^{lam y} x2)) Y(U(x2) Y(u, y) w, x2).

    u is in V, Y an intertwining operator of type (W3; W1, W2) and w in W1."""
    W1, W2, W3 = Y.src, Y.mid, Y.tgt
    Y_on_W1 = voa.vertex_map(W1)
    Y_on_W2 = voa.vertex_map(W2)
    Y_on_W3 = voa.vertex_map(W3)
    N1, N2 = windows
    res = CheckResult("x_comm", "commutator of geometrically-modified operators", True,
                      {"windows": list(windows), "cutoff": cutoff})
    u = svec(u)
    w = svec(w)
    mu = apply_u(Y_on_W2.src, u)
    mw = apply_u(W1, w)
    off = _x_offset(Y)
    # u_j w for the residue side
    uw = {}
    wt_max = max(W1.homogeneous_parts(w)) if w else 0
    ut_max = max(Y_on_W2.src.homogeneous_parts(u)) if u else 0
    jmax = int(ut_max + wt_max - 1 - W1.h)
    for j in range(0, jmax + 1):
        v = Y_on_W1.apply(u, j, w)
        if v:
            uw[j] = v
    for g in range(cutoff + 1):
        for b in W2.basis(g):
            bv = {b: ONE}
            for e1 in range(-N1, N1 + 1):
                for i2 in range(-N2, N2 + 1):
                    e2 = off + i2
                    a = _modified_x_coeff(Y, mw, e2, bv)
                    lhs = _modified_x_coeff(Y_on_W3, mu, e1, a)
                    a = _modified_x_coeff(Y_on_W2, mu, e1, bv)
                    lhs = vadd(lhs, _modified_x_coeff(Y, mw, e2, a) if a else {}, -1)
                    rhs = {}
                    for j, v in uw.items():
                        c = LAM * Scalar.mono(mpq(-e1) ** j / factorial(j), j)
                        if not c:
                            continue
                        t = modified_coefficient(Y, v, e1 + e2, bv)
                        if t:
                            rhs = vadd(rhs, t, c)
                    res.compared += 1
                    if lhs != rhs:
                        _mismatch(res, (b, e1, e2), lhs, rhs)
                        return res
    return res


def check_l1_derivative_op(Y, w, cutoff=5, order=5):
    """lam x d/dx Y(U(x)w, x) = Y(U(x) L(-1) w, x), coefficientwise on W2 basis vectors."""
    W1, W2, W3 = Y.src, Y.mid, Y.tgt
    res = CheckResult("l1_derivative_op", "L(-1)-derivative of a geometrically-modified operator", True,
                      {"cutoff": cutoff, "order": order})
    w = svec(w)
    mw = apply_u(W1, w)
    lw = W1.L(-1, w)
    ml = apply_u(W1, lw)
    parts = W1.homogeneous_parts(w)
    wmax = (max(parts) + 1) if parts else 0
    for g in range(cutoff + 1):
        for b in W2.basis(g):
            bv = {b: ONE}
            e_lo = W3.h - wmax - W2.weight(b)
            for i in range(order + 1):
                e = e_lo + i
                lhs = _modified_x_coeff(Y, mw, e, bv)
                lhs = {s: c * LAM * mpq(e) for s, c in lhs.items() if e}
                rhs = _modified_x_coeff(Y, ml, e, bv)
                res.compared += 1
                if lhs != rhs:
                    _mismatch(res, (b, e), lhs, rhs)
                    return res
    return res


def check_u1_conjugation(W, cutoff=5):
    """U(1) L(-1) = (lam L(-1) + lam L(0)) U(1) on basis vectors of W."""
    res = CheckResult("u1_l1_conjugation", "U(1) conjugation of L(-1)", True, {"cutoff": cutoff})
    for g in range(cutoff + 1):
        for b in W.basis(g):
            lhs = apply_u1(W, W.L(-1, {b: ONE}))
            ub = apply_u1(W, {b: ONE})
            rhs = vadd(W.L(-1, ub), W.L(0, ub))
            rhs = {s: c * LAM for s, c in rhs.items()}
            res.compared += 1
            if lhs != rhs:
                _mismatch(res, b, lhs, rhs)
                return res
    return res


def check_u_scaling(W, w, c=2):
    """U(c x) = c^{L(0)} U(x): components of U at cx equal c^s times those at x."""
    mv = apply_u(W, w)
    for s, v in mv.scaled(c).components.items():
        if v != {k: x * mpq(c) ** int(s) for k, x in mv.components[s].items()}:
            return False
    return True
