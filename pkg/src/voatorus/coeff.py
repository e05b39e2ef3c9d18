"""Exact scalars in Q(lam), where lam is a formal symbol standing for 2*pi*i.

A Scalar is stored as a Laurent polynomial numerator (dict exponent -> mpq)
over a monic polynomial denominator with nonzero constant term, reduced so
that numerator and denominator are coprime.  Almost every quantity met in
practice has denominator 1, and that case never touches polynomial gcds.
"""
import re
from fractions import Fraction

import mpmath
from gmpy2 import mpq

ONE_POLY = (mpq(1),)


def Q(x):
    """Coerce an int, Fraction, mpq or 'p/q' string to mpq."""
    if isinstance(x, str):
        return mpq(Fraction(x))
    return mpq(x)


# dense polynomials: tuples of mpq, lowest degree first, no trailing zeros

def _ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


def _pdivmod(a, b):
    a = list(a)
    q = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            a[k + i] -= c * y
        a = list(_ptrim(a))
    return _ptrim(q), tuple(a)


def _pgcd(a, b):
    while b:
        a, b = b, _pdivmod(a, b)[1]
    lead = a[-1]
    return tuple(x / lead for x in a)


def _laurent_split(num):
    """dict -> (e, dense poly) with num = lam^e * poly and poly[0] != 0."""
    e = min(num)
    top = max(num)
    return e, tuple(num.get(k, mpq(0)) for k in range(e, top + 1))


def _dense_to_laurent(p, e):
    return {k + e: c for k, c in enumerate(p) if c}


class Scalar:
    """Element of Q(lam).  Immutable; use the arithmetic operators."""

    __slots__ = ("num", "den", "_h")

    def __init__(self, num=None, den=ONE_POLY):
        # trusted constructor: callers pass normalized data
        self.num = num if num is not None else {}
        self.den = den
        self._h = None

    # construction -----------------------------------------------------
    @staticmethod
    def const(c):
        c = Q(c)
        return Scalar({0: c}) if c else ZERO

    @staticmethod
    def mono(c, k):
        """c * lam^k."""
        c = Q(c)
        return Scalar({k: c}) if c else ZERO

    @staticmethod
    def _make(num, den):
        num = {k: c for k, c in num.items() if c}
        if not num:
            return ZERO
        if den == ONE_POLY:
            return Scalar(num)
        e, N = _laurent_split(num)
        g = _pgcd(N, den)
        if len(g) > 1:
            N = _pdivmod(N, g)[0]
            den = _pdivmod(den, g)[0]
        lead = den[-1]
        if lead != 1:
            N = tuple(c / lead for c in N)
            den = tuple(c / lead for c in den)
        return Scalar(_dense_to_laurent(N, e), den)

    # predicates -------------------------------------------------------
    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_laurent(self):
        return self.den == ONE_POLY

    def is_rational(self):
        return self.den == ONE_POLY and (not self.num or list(self.num) == [0])

    def rational(self):
        if not self.is_rational():
            raise ValueError("scalar %s is not a rational number" % self)
        return self.num.get(0, mpq(0))

    def degree_range(self):
        if not self.num:
            return None
        return min(self.num), max(self.num)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == ONE_POLY and other.den == ONE_POLY:
            out = dict(self.num)
            for k, c in other.num.items():
                v = out.get(k)
                if v is None:
                    out[k] = c
                else:
                    v = v + c
                    if v:
                        out[k] = v
                    else:
                        del out[k]
            return Scalar(out) if out else ZERO
        a = _lmulp(self.num, other.den)
        b = _lmulp(other.num, self.den)
        for k, c in b.items():
            a[k] = a.get(k, mpq(0)) + c
        return Scalar._make(a, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -c for k, c in self.num.items()}, self.den)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            c = Q(other)
            if not c or not self.num:
                return ZERO
            return Scalar({k: v * c for k, v in self.num.items()}, self.den)
        if not self.num or not other.num:
            return ZERO
        if len(other.num) == 1 and other.den == ONE_POLY:
            (j, c), = other.num.items()
            return Scalar({k + j: v * c for k, v in self.num.items()}, self.den)
        if len(self.num) == 1 and self.den == ONE_POLY:
            (j, c), = self.num.items()
            return Scalar({k + j: v * c for k, v in other.num.items()}, other.den)
        out = {}
        for i, x in self.num.items():
            for j, y in other.num.items():
                out[i + j] = out.get(i + j, mpq(0)) + x * y
        if self.den == ONE_POLY and other.den == ONE_POLY:
            out = {k: c for k, c in out.items() if c}
            return Scalar(out) if out else ZERO
        return Scalar._make(out, _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("division by the zero scalar")
        e, N = _laurent_split(self.num)
        if len(N) == 1:
            c = N[0]
            num = _lmulp({-e: mpq(1) / c}, self.den)
            return Scalar({k: v for k, v in num.items() if v})
        return Scalar._make(_dense_to_laurent(self.den, -e), N)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            c = Q(other)
            if not c:
                raise ZeroDivisionError("division by the zero scalar")
            return Scalar({k: v / c for k, v in self.num.items()}, self.den)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.den == other.den and self.num == other.num

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._h is None:
            self._h = hash((tuple(sorted(self.num.items())), self.den))
        return self._h

    # numeric ----------------------------------------------------------
    def eval_lambda(self, precision=30):
        """Value at lam = 2*pi*i as an mpmath mpc."""
        with mpmath.workdps(precision + 5):
            lam = mpmath.mpc(0, 2 * mpmath.pi)
            top = mpmath.mpc(0)
            for k, c in self.num.items():
                top += mpmath.mpf(int(c.numerator)) / int(c.denominator) * lam ** k
            bot = mpmath.mpc(0)
            for k, c in enumerate(self.den):
                if c:
                    bot += mpmath.mpf(int(c.numerator)) / int(c.denominator) * lam ** k
            return top / bot

    def __complex__(self):
        return complex(self.eval_lambda(20))

    # text form --------------------------------------------------------
    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return "Scalar(%s)" % to_string(self)


def _lmulp(num, poly):
    """Laurent dict times dense poly."""
    if poly == ONE_POLY:
        return dict(num)
    out = {}
    for i, x in num.items():
        for j, y in enumerate(poly):
            if y:
                out[i + j] = out.get(i + j, mpq(0)) + x * y
    return out


ZERO = Scalar({})
ONE = Scalar({0: mpq(1)})
LAM = Scalar({1: mpq(1)})


def coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return from_string(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return Scalar.const(x)


def lam_pow(k):
    return Scalar({k: mpq(1)})


def eval_lambda(a, precision=30):
    return coerce(a).eval_lambda(precision)


# serialization: "p(λ)/q(λ)" --------------------------------------------

def _poly_str(p):
    if not p:
        return "0"
    parts = []
    for k in sorted(p, reverse=True):
        c = p[k]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = "λ" if k == 1 else "λ^%d" % k
            body = mono if a == 1 else "%s*%s" % (a, mono)
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += " %s %s" % (sign, body)
    return s


def to_string(a):
    if not a.num:
        return "0"
    e = min(a.num)
    shift = -e if e < 0 else 0
    top = {k + shift: c for k, c in a.num.items()}
    bot = _dense_to_laurent(a.den, shift)
    if bot == {0: 1}:
        return _poly_str(top)
    return "(%s)/(%s)" % (_poly_str(top), _poly_str(bot))


_TERM = re.compile(r"^\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*(?:(λ|lam|L)(?:\^(\d+))?)?\s*$")


def _parse_poly(s):
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    s = s.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    out = {}
    for piece in pieces:
        m = _TERM.match(piece)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise ValueError("cannot parse term %r" % piece)
        c = mpq(Fraction(m.group(2))) if m.group(2) else mpq(1)
        if m.group(1) == "-":
            c = -c
        k = 0
        if m.group(3):
            k = int(m.group(4)) if m.group(4) else 1
        out[k] = out.get(k, mpq(0)) + c
    return out


def _split_fraction(s):
    # a quotient is always written "(p)/(q)"; bare slashes belong to rationals
    m = re.match(r"^\((.*)\)\s*/\s*\((.*)\)$", s)
    if m:
        return m.group(1), m.group(2)
    return s, None


def from_string(s):
    s = s.strip()
    if s == "0":
        return ZERO
    left, right = _split_fraction(s)
    num = _parse_poly(left)
    if right is None:
        return Scalar._make(num, ONE_POLY) if num else ZERO
    den = _parse_poly(right)
    return Scalar._make(num, ONE_POLY) / Scalar._make(den, ONE_POLY)
