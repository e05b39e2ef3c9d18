"""Truncated multivariate Laurent series over Q(lam).

Each variable v carries a fractional offset o_v in [0, 1); a stored exponent
vector k means the monomial prod v**(o_v + k_v).  Per variable the series
keeps a window [lo, hi] on the integer parts: lo is the lowest exponent the
series can have, hi the highest exponent up to which it is known exactly
(None means exact to all orders, e.g. a polynomial).  Any operation that has
to drop information outside a window records the variable in ``trunc``.
"""
import json
from fractions import Fraction

from gmpy2 import mpq

from .coeff import ONE, ZERO, Scalar, coerce, from_string, lam_pow, to_string


def _frac(x):
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def _min_hi(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class MultiSeries:
    __slots__ = ("vars", "offset", "lo", "hi", "terms", "trunc")

    def __init__(self, vars, terms=None, offset=None, lo=None, hi=None, trunc=()):
        self.vars = tuple(vars)
        n = len(self.vars)
        terms = terms or {}
        self.offset = tuple(Fraction(o) for o in offset) if offset is not None else (Fraction(0),) * n
        if lo is None:
            lo = tuple(min((k[i] for k in terms), default=0) for i in range(n))
        if hi is None:
            hi = (None,) * n
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        self.trunc = frozenset(trunc)
        kept = {}
        dropped = set()
        for k, c in terms.items():
            if not c:
                continue
            ok = True
            for i in range(n):
                if k[i] < self.lo[i] or (self.hi[i] is not None and k[i] > self.hi[i]):
                    ok = False
                    dropped.add(self.vars[i])
                    break
            if ok:
                kept[k] = c if isinstance(c, Scalar) else coerce(c)
        self.terms = kept
        if dropped:
            self.trunc = self.trunc | dropped

    # construction helpers --------------------------------------------
    @staticmethod
    def const(c, vars=()):
        c = coerce(c)
        n = len(vars)
        return MultiSeries(vars, {(0,) * n: c} if c else {}, lo=(0,) * n)

    @staticmethod
    def monomial(vars, exps, c=ONE, hi=None):
        return MultiSeries(vars, {tuple(exps): coerce(c)}, lo=tuple(exps), hi=hi)

    @staticmethod
    def univariate(var, coeffs, hi=None, offset=0, lo=None):
        """coeffs: dict exponent -> scalar."""
        terms = {(k,): coerce(c) for k, c in coeffs.items()}
        return MultiSeries((var,), terms, offset=(offset,), lo=None if lo is None else (lo,), hi=(hi,))

    def copy_with(self, terms=None, lo=None, hi=None, trunc=None, vars=None, offset=None):
        return MultiSeries(self.vars if vars is None else vars,
                           self.terms if terms is None else terms,
                           self.offset if offset is None else offset,
                           self.lo if lo is None else lo,
                           self.hi if hi is None else hi,
                           self.trunc if trunc is None else trunc)

    # basic queries ----------------------------------------------------
    def index(self, var):
        return self.vars.index(var)

    def coeff(self, exps):
        return self.terms.get(tuple(exps), ZERO)

    def is_zero(self):
        return not self.terms

    def window(self):
        return {v: (self.lo[i], self.hi[i]) for i, v in enumerate(self.vars)}

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "MultiSeries(%s: 0)" % (",".join(self.vars))
        items = sorted(self.terms.items())
        shown = " + ".join("(%s)*%s" % (c, self._mono_str(k)) for k, c in items[:8])
        more = " + ..." if len(items) > 8 else ""
        return "MultiSeries(%s: %s%s)" % (",".join(self.vars), shown, more)

    def _mono_str(self, k):
        parts = []
        for i, v in enumerate(self.vars):
            e = self.offset[i] + k[i]
            if e:
                parts.append("%s^%s" % (v, e))
        return "*".join(parts) or "1"

    # variable alignment ----------------------------------------------
    def extend(self, vars):
        """Re-express over a superset of variables (new ones at exponent 0)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        pos = [self.vars.index(v) if v in self.vars else None for v in vars]
        for v in self.vars:
            if v not in vars:
                raise ValueError("variable %s missing from target list" % v)
        terms = {tuple(k[p] if p is not None else 0 for p in pos): c for k, c in self.terms.items()}
        offset = tuple(self.offset[p] if p is not None else Fraction(0) for p in pos)
        lo = tuple(self.lo[p] if p is not None else 0 for p in pos)
        hi = tuple(self.hi[p] if p is not None else None for p in pos)
        return MultiSeries(vars, terms, offset, lo, hi, self.trunc)

    def _aligned(self, other):
        vars = list(self.vars)
        for v in other.vars:
            if v not in vars:
                vars.append(v)
        return self.extend(vars), other.extend(vars)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, MultiSeries):
            other = MultiSeries.const(other, self.vars)
        f, g = self._aligned(other)
        if f.offset != g.offset:
            raise ValueError("offsets differ: %s vs %s" % (f.offset, g.offset))
        n = len(f.vars)
        lo = tuple(min(f.lo[i], g.lo[i]) for i in range(n))
        hi = tuple(_min_hi(f.hi[i], g.hi[i]) for i in range(n))
        terms = dict(f.terms)
        for k, c in g.terms.items():
            v = terms.get(k)
            terms[k] = c if v is None else v + c
        return MultiSeries(f.vars, terms, f.offset, lo, hi, f.trunc | g.trunc)

    __radd__ = __add__

    def __neg__(self):
        return self.copy_with(terms={k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiSeries):
            other = MultiSeries.const(other, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = coerce(c)
        if not c:
            return self.copy_with(terms={})
        return self.copy_with(terms={k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        out = MultiSeries.const(ONE, self.vars)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            other = MultiSeries.const(other, self.vars)
        f, g = self._aligned(other)
        return f.offset == g.offset and f.terms == g.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # windows ----------------------------------------------------------
    def truncate(self, window):
        """window: dict var -> (lo, hi) on integer parts; None keeps a bound."""
        lo = list(self.lo)
        hi = list(self.hi)
        for v, (a, b) in window.items():
            if v not in self.vars:
                continue
            i = self.vars.index(v)
            if a is not None:
                lo[i] = max(lo[i], a) if self.terms else a
            if b is not None:
                hi[i] = b if hi[i] is None else min(hi[i], b)
        terms = {}
        for k, c in self.terms.items():
            if all(lo[i] <= k[i] and (hi[i] is None or k[i] <= hi[i]) for i in range(len(k))):
                terms[k] = c
        # narrowing a window on purpose is not a loss of exactness
        return MultiSeries(self.vars, terms, self.offset, lo, hi, self.trunc)

    def with_hi(self, window):
        """Declare exactness bounds without dropping anything else."""
        return self.truncate(window)

    # calculus ---------------------------------------------------------
    def deriv(self, var):
        i = self.vars.index(var)
        o = self.offset[i]
        terms = {}
        for k, c in self.terms.items():
            e = o + k[i]
            if e:
                kk = list(k)
                kk[i] -= 1
                terms[tuple(kk)] = c * mpq(e)
        lo = list(self.lo)
        hi = list(self.hi)
        lo[i] -= 1
        if hi[i] is not None:
            hi[i] -= 1
        return MultiSeries(self.vars, terms, self.offset, lo, hi, self.trunc)

    def euler(self, var):
        """var * d/dvar."""
        i = self.vars.index(var)
        o = self.offset[i]
        terms = {}
        for k, c in self.terms.items():
            e = o + k[i]
            if e:
                terms[k] = c * mpq(e)
        return self.copy_with(terms=terms)

    def scale_var(self, var, c):
        """Substitute var -> c*var (integer exponents only)."""
        i = self.vars.index(var)
        if self.offset[i]:
            raise ValueError("cannot rescale a variable with fractional offset")
        c = coerce(c)
        cache = {}
        terms = {}
        for k, v in self.terms.items():
            e = k[i]
            if e not in cache:
                cache[e] = c ** e
            terms[k] = v * cache[e]
        return self.copy_with(terms=terms)

    def residue(self, var):
        return self.coefficient(var, -1)

    def coefficient(self, var, e):
        """Coefficient of var**(offset+e), as a series in the other variables."""
        if var not in self.vars:
            raise ValueError("variable %s not in series" % var)
        i = self.vars.index(var)
        if e < self.lo[i] and self.terms:
            return MultiSeries(self.vars[:i] + self.vars[i + 1:], {})
        if self.hi[i] is not None and e > self.hi[i]:
            raise ValueError("window of %s does not reach exponent %s" % (var, e))
        terms = {k[:i] + k[i + 1:]: c for k, c in self.terms.items() if k[i] == e}
        rest = lambda t: t[:i] + t[i + 1:]
        return MultiSeries(rest(self.vars), terms, rest(self.offset), rest(self.lo), rest(self.hi),
                           self.trunc - {var})

    def substitute(self, var, images):
        """Replace var by a monomial: images maps new-variable -> integer power.

        Only valid for integer exponents of var.  New variables are appended.
        The result carries no window information for the new variables
        beyond what the terms show; callers truncate explicitly.
        """
        i = self.vars.index(var)
        if self.offset[i]:
            raise ValueError("cannot substitute into a fractional-offset variable")
        keep = [v for v in self.vars if v != var]
        vars = list(keep)
        for v in images:
            if v not in vars:
                vars.append(v)
        pos = {v: j for j, v in enumerate(vars)}
        terms = {}
        for k, c in self.terms.items():
            e = [0] * len(vars)
            for j, v in enumerate(self.vars):
                if v != var:
                    e[pos[v]] += k[j]
            for v, p in images.items():
                e[pos[v]] += p * k[i]
            e = tuple(e)
            terms[e] = terms.get(e, ZERO) + c
        offset = [Fraction(0)] * len(vars)
        for j, v in enumerate(self.vars):
            if v != var:
                offset[pos[v]] = self.offset[j]
        return MultiSeries(vars, terms, offset, None, None, self.trunc - {var})

    def reorder(self, vars):
        return self.extend(vars)

    def drop_var(self, var):
        """Remove a variable whose exponents are all zero."""
        i = self.vars.index(var)
        if any(k[i] for k in self.terms) or self.offset[i]:
            raise ValueError("variable %s still occurs" % var)
        rest = lambda t: t[:i] + t[i + 1:]
        return MultiSeries(rest(self.vars), {rest(k): c for k, c in self.terms.items()},
                           rest(self.offset), rest(self.lo), rest(self.hi), self.trunc - {var})

    def map_coeffs(self, fn):
        return self.copy_with(terms={k: fn(c) for k, c in self.terms.items()})

    # serialization ----------------------------------------------------
    def to_json(self):
        return {
            "vars": list(self.vars),
            "offset": {v: str(self.offset[i]) for i, v in enumerate(self.vars)},
            "terms": [{"exp": list(k), "val": to_string(c)} for k, c in sorted(self.terms.items())],
        }

    def dumps(self):
        return json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True)

    @staticmethod
    def from_json(d):
        if isinstance(d, str):
            d = json.loads(d)
        vars = tuple(d["vars"])
        offset = tuple(Fraction(d.get("offset", {}).get(v, "0")) for v in vars)
        terms = {tuple(t["exp"]): from_string(t["val"]) for t in d["terms"]}
        return MultiSeries(vars, terms, offset)


def mul(f, g, window=None):
    """Product with conservative exactness window, optionally overridden.

    The default assumes each lo is a genuine lower bound of the support, so
    the product is exact up to min(hi_f + lo_g, hi_g + lo_f).  ``window``
    (dict var -> (lo, hi)) narrows the result further.
    """
    f, g = f._aligned(g)
    n = len(f.vars)
    offset = []
    carry = []
    for i in range(n):
        o = f.offset[i] + g.offset[i]
        c = 1 if o >= 1 else 0
        offset.append(o - c)
        carry.append(c)
    lo = [f.lo[i] + g.lo[i] + carry[i] for i in range(n)]
    hi = []
    for i in range(n):
        a = None if f.hi[i] is None else f.hi[i] + g.lo[i] + carry[i]
        b = None if g.hi[i] is None else g.hi[i] + f.lo[i] + carry[i]
        hi.append(_min_hi(a, b))
    if window:
        for v, (a, b) in window.items():
            if v in f.vars:
                i = f.vars.index(v)
                if a is not None:
                    lo[i] = max(lo[i], a)
                if b is not None:
                    hi[i] = b if hi[i] is None else min(hi[i], b)
    hi_eff = [h - carry[i] if h is not None else None for i, h in enumerate(hi)]
    lo_eff = [l - carry[i] for i, l in enumerate(lo)]
    out = {}
    dropped = set()
    gitems = list(g.terms.items())
    for k1, c1 in f.terms.items():
        for k2, c2 in gitems:
            ok = True
            for i in range(n):
                s = k1[i] + k2[i]
                if s < lo_eff[i] or (hi_eff[i] is not None and s > hi_eff[i]):
                    ok = False
                    if hi_eff[i] is not None and s > hi_eff[i]:
                        dropped.add(f.vars[i])
                    break
            if not ok:
                continue
            k = tuple(k1[i] + k2[i] + carry[i] for i in range(n))
            v = out.get(k)
            p = c1 * c2
            out[k] = p if v is None else v + p
    trunc = f.trunc | g.trunc
    # a term falling beyond a window chosen on purpose is not information loss
    if not window:
        trunc = trunc | dropped
    return MultiSeries(f.vars, out, offset, lo, hi, trunc)


def first_mismatch(f, g):
    """None if f == g termwise, else (exponent dict, f-coeff, g-coeff)."""
    f, g = f._aligned(g)
    if f.offset != g.offset:
        return ({"offset": [str(o) for o in f.offset]}, "offset", [str(o) for o in g.offset])
    keys = sorted(set(f.terms) | set(g.terms))
    for k in keys:
        a = f.terms.get(k, ZERO)
        b = g.terms.get(k, ZERO)
        if a != b:
            exps = {v: str(f.offset[i] + k[i]) for i, v in enumerate(f.vars)}
            return (exps, to_string(a), to_string(b))
    return None


# univariate tools --------------------------------------------------------

def _udict(f):
    if len(f.vars) != 1:
        raise ValueError("univariate series expected")
    if f.offset[0]:
        raise ValueError("integer exponents expected")
    return {k[0]: c for k, c in f.terms.items()}


def _umul(a, b, order):
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j <= order:
                out[i + j] = out.get(i + j, ZERO) + x * y
    return {k: c for k, c in out.items() if c}


def _uinv(a, order):
    """1/a for a with nonzero constant term, to the given order."""
    a0 = a.get(0, ZERO)
    if not a0:
        raise ValueError("constant term must be nonzero")
    inv0 = a0.inverse()
    out = {0: inv0}
    for n in range(1, order + 1):
        s = ZERO
        for k in range(1, n + 1):
            if k in a and (n - k) in out:
                s = s + a[k] * out[n - k]
        if s:
            out[n] = -s * inv0
    return out


def _upow_unit(a, s, order):
    """a**s for a with constant term 1 and rational s (binomial series)."""
    if a.get(0, ZERO) != ONE:
        raise ValueError("constant term 1 expected")
    s = mpq(Fraction(s))
    # J.C.P. Miller recurrence: n b_n = sum_{k=1}^n ((s+1)k - n) a_k b_{n-k}
    out = {0: ONE}
    for n in range(1, order + 1):
        acc = ZERO
        for k in range(1, n + 1):
            if k in a and (n - k) in out:
                acc = acc + a[k] * out[n - k] * ((s + 1) * k - n)
        if acc:
            out[n] = acc / n
    return out


def series_inverse(f, order):
    """1/f for a univariate series with nonzero lowest coefficient."""
    d = _udict(f)
    low = min(d)
    shifted = {k - low: c for k, c in d.items()}
    inv = _uinv(shifted, order + low)
    return MultiSeries.univariate(f.vars[0], {k - low: c for k, c in inv.items()}, hi=order)


def series_power(f, s, order):
    """f**s for f = c*y^a*(1 + ...) with c = 1 and s rational; exponent a*s must be integral."""
    d = _udict(f)
    low = min(d)
    if d[low] != ONE:
        raise ValueError("leading coefficient 1 required")
    if Fraction(low) * Fraction(s) != int(Fraction(low) * Fraction(s)):
        raise ValueError("fractional leading exponent")
    shift = int(Fraction(low) * Fraction(s))
    unit = {k - low: c for k, c in d.items()}
    p = _upow_unit(unit, s, order - shift)
    return MultiSeries.univariate(f.vars[0], {k + shift: c for k, c in p.items()}, hi=order)


def exp_series(var, a, order):
    """e^{a*var} to the given order."""
    a = coerce(a)
    out = {}
    term = ONE
    for n in range(order + 1):
        if n:
            term = term * a / n
        if term:
            out[n] = term
    return MultiSeries.univariate(var, out, hi=order)


def log1p_series(var, a, order):
    """(1/a) log(1 + a*var) to the given order."""
    a = coerce(a)
    out = {}
    for n in range(1, order + 1):
        c = a ** (n - 1) * mpq((-1) ** (n + 1), n)
        out[n] = c
    return MultiSeries.univariate(var, out, hi=order)


def compose(f, g, order=None):
    """f(g(y)) for univariate f, g with g(0) = 0 and nonzero linear term."""
    fd = _udict(f)
    gd = _udict(g)
    if gd.get(0, ZERO) or min(gd, default=1) < 1:
        raise ValueError("g must have zero constant term")
    if 1 not in gd:
        if any(k < 0 for k in fd):
            raise ValueError("g needs a linear term when f has a pole")
    flo = min(fd) if fd else 0
    f_hi = f.hi[0]
    g_hi = g.hi[0]
    cands = []
    if f_hi is not None:
        cands.append(f_hi)
    if g_hi is not None:
        cands.append(g_hi + flo - 1)
    if order is not None:
        cands.append(order)
    if not cands:
        cands.append(max(fd, default=0) * max(gd, default=1))
    N = min(cands)
    out = {}
    if fd:
        # g = y * h with h(0) = g1
        h = {k - 1: c for k, c in gd.items()}
        need = N - flo
        maxk = max(fd)
        powers = {}
        cur = {0: ONE}
        for k in range(0, maxk + 1):
            if k:
                cur = _umul(cur, h, need)
            powers[k] = cur
        if flo < 0:
            hinv = _uinv(h, need)
            cur = {0: ONE}
            for k in range(-1, flo - 1, -1):
                cur = _umul(cur, hinv, need)
                powers[k] = cur
        for k, c in fd.items():
            for j, v in powers[k].items():
                e = k + j
                if e <= N:
                    out[e] = out.get(e, ZERO) + c * v
    return MultiSeries.univariate(g.vars[0], {k: v for k, v in out.items() if v}, hi=N)


def comp_inverse(f, order):
    """Compositional inverse of f = y + O(y^2) to the given order."""
    d = _udict(f)
    if d.get(1, ZERO) != ONE or d.get(0, ZERO) or min(d) < 1:
        raise ValueError("f must be y + O(y^2)")
    var = f.vars[0]
    g = {1: ONE}
    fs = MultiSeries.univariate(var, d, hi=order)
    for n in range(2, order + 1):
        comp = _udict(compose(fs, MultiSeries.univariate(var, g, hi=order), order=n))
        c = comp.get(n, ZERO)
        if c:
            g[n] = -c
    return MultiSeries.univariate(var, g, hi=order)


class DerivationCoeffs:
    """coeffs[j-1] is c_j, the coefficient of y^{j+1} d/dy."""

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)

    def __getitem__(self, j):
        return self.coeffs[j - 1]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return "DerivationCoeffs(%s)" % ", ".join(str(c) for c in self.coeffs)


def _apply_D(coeffs, p, order):
    """sum_j c_j y^{j+1} d/dy applied to the polynomial p (dict), truncated."""
    out = {}
    for k, c in p.items():
        if not k:
            continue
        dk = c * k
        for j, cj in enumerate(coeffs, start=1):
            e = k + j
            if e > order:
                break
            if cj:
                out[e] = out.get(e, ZERO) + cj * dk
    return {k: v for k, v in out.items() if v}


def exp_derivation_apply(coeffs, order):
    """exp(sum_j c_j y^{j+1} d/dy) y, as a dict, to the given order."""
    total = {1: ONE}
    term = {1: ONE}
    n = 0
    while term:
        n += 1
        term = _apply_D(coeffs, term, order)
        term = {k: v / n for k, v in term.items()}
        for k, v in term.items():
            total[k] = total.get(k, ZERO) + v
    return {k: v for k, v in total.items() if v}


def exp_derivation_coeffs(f, count):
    """Solve exp(sum c_j y^{j+1} d/dy) y = f for c_1..c_count (triangular)."""
    d = _udict(f)
    if f.hi[0] is not None and f.hi[0] < count + 1:
        raise ValueError("input known only to order %s, need %s" % (f.hi[0], count + 1))
    if d.get(1, ZERO) != ONE or d.get(0, ZERO):
        raise ValueError("f must be y + O(y^2)")
    coeffs = []
    for j in range(1, count + 1):
        trial = exp_derivation_apply(coeffs + [ZERO], j + 1)
        coeffs.append(d.get(j + 1, ZERO) - trial.get(j + 1, ZERO))
    return DerivationCoeffs(coeffs)


def delta_expand(ratio, kmin, kmax, exp_factor=None):
    """sum_{k=kmin..kmax} (ratio)^k, ratio a monomial given as dict var -> power.

    exp_factor = (yvar, a, order) multiplies the ratio by e^{a*yvar}, so each
    term becomes ratio^k e^{k a yvar} expanded to the given y-order.
    """
    vars = list(ratio)
    if exp_factor:
        vars.append(exp_factor[0])
    terms = {}
    for k in range(kmin, kmax + 1):
        base = [ratio[v] * k for v in ratio]
        if exp_factor:
            yv, a, order = exp_factor
            e = _udict(exp_series(yv, coerce(a) * k, order))
            for j, c in e.items():
                terms[tuple(base + [j])] = c
        else:
            terms[tuple(base)] = ONE
    hi = None
    if exp_factor:
        hi = tuple([None] * len(ratio) + [exp_factor[2]])
    return MultiSeries(vars, terms, hi=hi)
