"""Eisenstein series, the P_m kernels, Weierstrass expansions and the ring R.

Conventions (lam = 2 pi i):
  G2k(q)  = -lam^{2k} B_{2k}/(2k)! + 2 lam^{2k}/(2k-1)! sum_n sigma_{2k-1}(n) q^n
  P_m(x;q) = lam^m/(m-1)! sum_{l>0} l^{m-1} ( x^l/(1-q^l) - (-1)^{m-1} q^l x^{-l}/(1-q^l) )
  wp_m(y;q) = y^{-m} + (-1)^m sum_{k>=1} binom(2k+1, m-1) G_{2k+2}(q) y^{2k+2-m}
"""
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from gmpy2 import mpq

from .coeff import ZERO, Scalar
from .fps import MultiSeries, mul
from .linalg import solve


@lru_cache(maxsize=None)
def _bernoulli_q(n):
    if n == 0:
        return mpq(1)
    s = mpq(0)
    for k in range(n):
        s += comb(n + 1, k) * _bernoulli_q(k)
    return -s / (n + 1)


def bernoulli(n):
    """B_n with B_1 = -1/2, from sum_{k<=n} binom(n+1, k) B_k = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Fraction(int(_bernoulli_q(n).numerator), int(_bernoulli_q(n).denominator))


def bernoulli_plus(n):
    """Bernoulli numbers of t e^t/(e^t - 1): B_1 = +1/2, otherwise as usual."""
    return -bernoulli(1) if n == 1 else bernoulli(n)


@lru_cache(maxsize=None)
def _sigma(r, n):
    return sum(d ** r for d in range(1, n + 1) if n % d == 0)


def zeta2k_twice(k):
    """2 zeta(2k) = -lam^{2k} B_{2k}/(2k)! as a Scalar."""
    return Scalar.mono(-_bernoulli_q(2 * k) / factorial(2 * k), 2 * k)


@lru_cache(maxsize=None)
def eisenstein(k, N_q):
    """G_{2k}(q) to q-order N_q (k >= 1; k = 1 is G_2)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = {(0,): zeta2k_twice(k)}
    c = mpq(2, factorial(2 * k - 1))
    for n in range(1, N_q + 1):
        terms[(n,)] = Scalar.mono(c * _sigma(2 * k - 1, n), 2 * k)
    return MultiSeries(("q",), terms, lo=(0,), hi=(N_q,))


def eisenstein_table(kmax, N_q):
    return {k: eisenstein(k, N_q) for k in range(1, kmax + 1)}


@lru_cache(maxsize=None)
def p_series(m, N_x, N_q):
    """P_m(x;q) on the x-window [-N_x, N_x] to q-order N_q."""
    if m < 1:
        raise ValueError("m must be >= 1")
    terms = {}
    pref = mpq(1, factorial(m - 1))
    sgn = (-1) ** (m - 1)
    for l in range(1, N_x + 1):
        c = pref * l ** (m - 1)
        # x^l/(1-q^l) = sum_j x^l q^{jl}
        j = 0
        while j * l <= N_q:
            key = (l, j * l)
            terms[key] = terms.get(key, ZERO) + Scalar.mono(c, m)
            j += 1
        # -(-1)^{m-1} q^l x^{-l}/(1-q^l)
        j = 1
        while j * l <= N_q:
            key = (-l, j * l)
            terms[key] = terms.get(key, ZERO) + Scalar.mono(-sgn * c, m)
            j += 1
    return MultiSeries(("x", "q"), terms, lo=(-N_x, 0), hi=(N_x, N_q))


class WpSeries:
    """wp_m(y;q) as a MultiSeries in (y, q) on the y-window [-m, N_y]."""

    def __init__(self, m, series):
        self.m = m
        self.series = series

    def __repr__(self):
        return "WpSeries(m=%d, %r)" % (self.m, self.series)


@lru_cache(maxsize=None)
def wp_tilde(m, N_y, N_q):
    if m < 1:
        raise ValueError("m must be >= 1")
    terms = {(-m, 0): Scalar.const(1)}
    sgn = (-1) ** m
    k = 1
    while 2 * k + 2 - m <= N_y:
        b = comb(2 * k + 1, m - 1)
        if b:
            G = eisenstein(k + 1, N_q)
            for (j,), c in G.terms.items():
                terms[(2 * k + 2 - m, j)] = c * (sgn * b)
        k += 1
    return WpSeries(m, MultiSeries(("y", "q"), terms, lo=(-m, 0), hi=(N_y, N_q)))


def negate_var(s, var):
    """s(var -> -var) for integer exponents."""
    i = s.vars.index(var)
    return s.copy_with(terms={k: (-c if k[i] % 2 else c) for k, c in s.terms.items()})


# the ring R --------------------------------------------------------------

SYMBOLS = ("G4", "G6", "P2", "P3")
WEIGHTS = (4, 6, 2, 3)


class RPoly:
    """Polynomial in G4, G6, P2, P3 with rational coefficients."""

    def __init__(self, terms=None):
        self.terms = {k: mpq(v) for k, v in (terms or {}).items() if v}

    @staticmethod
    def sym(name):
        e = [0, 0, 0, 0]
        e[SYMBOLS.index(name)] = 1
        return RPoly({tuple(e): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return RPoly(out)

    def __neg__(self):
        return RPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RPoly):
            return RPoly({k: v * mpq(other) for k, v in self.terms.items()})
        out = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                k = tuple(i + j for i, j in zip(a, b))
                out[k] = out.get(k, 0) + x * y
        return RPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, RPoly) and self.terms == other.terms

    def weights(self):
        return {sum(e * w for e, w in zip(k, WEIGHTS)) for k in self.terms}

    def derive(self):
        """d/dy with dG=0, dP2 = -2 P3, dP3 = -(1/2) wp2'' where the cubic
        relation gives wp2'' = 6 P2^2 - 30 G4."""
        dP = {2: RPoly.sym("P3") * -2,
              3: (RPoly.sym("P2") * RPoly.sym("P2") * 6 - RPoly.sym("G4") * 30) * mpq(-1, 2)}
        out = RPoly()
        for k, v in self.terms.items():
            for idx, sym in ((2, "P2"), (3, "P3")):
                e = k[idx]
                if e:
                    kk = list(k)
                    kk[idx] -= 1
                    out = out + RPoly({tuple(kk): v * e}) * dP[idx]
        return out

    def to_list(self):
        """[(coefficient string, {symbol: power}), ...] sorted."""
        out = []
        for k in sorted(self.terms, reverse=True):
            out.append((str(self.terms[k]), {s: e for s, e in zip(SYMBOLS, k) if e}))
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, mono in self.to_list():
            m = "*".join(s if e == 1 else "%s^%d" % (s, e) for s, e in mono.items())
            parts.append("%s*%s" % (c, m) if m else c)
        return " + ".join(parts)

    def evaluate(self, values):
        """values: dict symbol -> MultiSeries."""
        total = None
        for k, c in self.terms.items():
            term = None
            for s, e in zip(SYMBOLS, k):
                for _ in range(e):
                    term = values[s] if term is None else mul(term, values[s])
            if term is None:
                term = MultiSeries.const(1, ("y", "q"))
            term = term.scale(c)
            total = term if total is None else total + term
        return total


def cubic_residual(N_y, N_q):
    """(d wp2)^2 - (4 wp2^3 - 60 G4 wp2 - 140 G6) as a truncated series."""
    p2 = wp_tilde(2, N_y, N_q).series
    dp2 = p2.deriv("y")
    G4 = eisenstein(2, N_q).extend(("y", "q"))
    G6 = eisenstein(3, N_q).extend(("y", "q"))
    lhs = mul(dp2, dp2)
    rhs = mul(mul(p2, p2), p2).scale(4) - mul(G4, p2).scale(60) - G6.scale(140)
    return lhs - rhs


def _r_values(N_y, N_q):
    return {
        "G4": eisenstein(2, N_q).extend(("y", "q")),
        "G6": eisenstein(3, N_q).extend(("y", "q")),
        "P2": wp_tilde(2, N_y, N_q).series,
        "P3": wp_tilde(3, N_y, N_q).series,
    }


def reduce_to_R(m, orders=(10, 8)):
    """Polynomial p in G4, G6, P2, P3 with p = wp_m, verified as series."""
    if m < 2:
        raise ValueError("m must be >= 2")
    p = RPoly.sym("P2")
    for j in range(2, m):
        p = p.derive() * mpq(-1, j)
    N_y, N_q = orders
    res = p.evaluate(_r_values(N_y, N_q)) - wp_tilde(m, N_y, N_q).series
    if not res.is_zero():
        raise ArithmeticError("reduction of wp_%d does not verify at orders %s" % (m, orders))
    return p


def eisenstein_reduce(k, N_q=12):
    """Polynomial in G4, G6 equal to G_{2k}, solved from q-expansions."""
    if k < 2:
        raise ValueError("k must be >= 2")
    w = 2 * k
    monos = [(a, b) for a in range(w // 4 + 1) for b in range(w // 6 + 1) if 4 * a + 6 * b == w]
    G4 = eisenstein(2, N_q)
    G6 = eisenstein(3, N_q)
    target = eisenstein(k, N_q)
    series = {}
    for a, b in monos:
        s = MultiSeries.const(1, ("q",))
        for _ in range(a):
            s = mul(s, G4)
        for _ in range(b):
            s = mul(s, G6)
        series[(a, b)] = s
    # every coefficient is lam^{2k} times a rational
    eqs = []
    for j in range(N_q + 1):
        eq = {mono: series[mono].coeff((j,)) for mono in monos}
        eq["rhs"] = target.coeff((j,))
        eqs.append({key: v for key, v in eq.items() if v})
    sol = solve(eqs, monos)
    if sol is None:
        raise ArithmeticError("no unique reduction for G_%d" % w)
    p = RPoly()
    for (a, b), c in sol.items():
        c = c if not isinstance(c, Scalar) else c.rational()
        p = p + RPoly({(a, b, 0, 0): c})
    check = None
    for (a, b), c in sol.items():
        term = series[(a, b)].scale(c)
        check = term if check is None else check + term
    if not (check - target).is_zero():
        raise ArithmeticError("reduction of G_%d does not verify" % w)
    return p
