"""Desk-scale vertex operator algebras and their modules.

Three families:
  * free boson: generator h with [h(m), h(n)] = kappa*m*delta_{m+n,0}.  With
    kappa = 1 this is the rank-one Heisenberg VOA and its Fock modules; with
    kappa = 2N and charges in a coset of 2N*Z it is the lattice VOA of
    sqrt(2N)*Z and its sectors.  A state (p, parts) stands for
    h(-n1)...h(-nk) e^p with h(0) = p and weight p^2/(2 kappa) + sum(parts).
  * universal Virasoro: states are tuples (n1 >= ... >= nk) standing for
    L(-n1)...L(-nk) v, with parts >= 2 on the vacuum module.

Vertex operators of arbitrary states are built from the generator modes by
the iterate formula
  (a_m v)_k = sum_i (-1)^i binom(m, i) (a_{m-i} v_{k+i} - (-1)^m v_{m+k-i} a_i),
which also holds for intertwining operators.  All module-level coefficients
are rational (mpq); results are memoized per (state, mode, state).
"""
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from gmpy2 import mpq

from .linalg import vadd, vscale


def partitions(n, min_part=1, max_part=None):
    """Partitions of n as non-increasing tuples with parts in [min_part, max_part]."""
    return _partitions(n, min_part, n if max_part is None else max_part)


@lru_cache(maxsize=None)
def _partitions(n, lo, hi):
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, hi), lo - 1, -1):
        for rest in _partitions(n - first, lo, first):
            out.append((first,) + rest)
    return tuple(out)


def _insert_part(parts, n):
    lst = list(parts)
    i = 0
    while i < len(lst) and lst[i] >= n:
        i += 1
    lst.insert(i, n)
    return tuple(lst)


def _remove_part(parts, n):
    lst = list(parts)
    lst.remove(n)
    return tuple(lst)


def _merge(a, b):
    return tuple(sorted(a + b, reverse=True))


def gbinom(m, i):
    """Generalized binomial coefficient binom(m, i) for integer or rational m."""
    out = mpq(1)
    for j in range(i):
        out = out * (m - j) / (j + 1)
    return out


class GradedModule:
    """Common interface: lowest weight h, central charge c, graded basis."""

    def __init__(self, name, h, c, cutoff):
        self.name = name
        self.h = Fraction(h)
        self.c = Fraction(c)
        self.cutoff = cutoff
        self.frac = self.h - (self.h.numerator // self.h.denominator)
        self._basis = {}

    def basis(self, n):
        if n < 0:
            return ()
        if n not in self._basis:
            self._basis[n] = tuple(self._enumerate(n))
        return self._basis[n]

    def dim(self, n):
        return len(self.basis(n))

    def basis_upto(self, G):
        out = []
        for n in range(G + 1):
            out.extend(self.basis(n))
        return out

    def weight(self, s):
        return self.h + self.grade(s)

    def vec_weight(self, v):
        ws = {self.weight(s) for s in v}
        if len(ws) != 1:
            raise ValueError("vector is not homogeneous")
        return ws.pop()

    def homogeneous_parts(self, v):
        out = {}
        for s, c in v.items():
            out.setdefault(self.weight(s), {})[s] = c
        return out

    def L(self, n, v):
        out = {}
        for s, c in v.items():
            out = vadd(out, self.L_state(n, s), c)
        return out

    def __repr__(self):
        return "<%s h=%s c=%s>" % (self.name, self.h, self.c)


# free boson -------------------------------------------------------------

class FockModule(GradedModule):
    """Fock space of h, or a lattice sector (several charges).

    charges: the residue class {p0 + step*t : t in Z} (step None means a
    single charge p0)."""

    def __init__(self, name, kappa, p0, step=None, cutoff=8):
        self.kappa = Fraction(kappa)
        self.p0 = Fraction(p0)
        self.step = step
        if step is None:
            h = self.p0 ** 2 / (2 * self.kappa)
        else:
            r = self.p0 % step
            h = min(r, step - r) ** 2 / (2 * self.kappa) if r else Fraction(0)
        GradedModule.__init__(self, name, h, 1, cutoff)

    def charge_weight(self, p):
        return Fraction(p) ** 2 / (2 * self.kappa)

    def charges_upto(self, n):
        if self.step is None:
            return [self.p0]
        out = []
        r = self.p0 % self.step
        bound = self.h + n
        t = 0
        # charges r + step*t on both sides
        while True:
            found = False
            for p in (r + self.step * t, r - self.step * (t + 1)):
                if self.charge_weight(p) <= bound:
                    out.append(Fraction(p))
                    found = True
            if not found and t > 0:
                break
            t += 1
        return sorted(set(out))

    def in_module(self, p):
        p = Fraction(p)
        if self.step is None:
            return p == self.p0
        return (p - self.p0) % self.step == 0

    def grade(self, s):
        p, parts = s
        return int(self.charge_weight(p) - self.h) + sum(parts)

    def _enumerate(self, n):
        out = []
        for p in self.charges_upto(n):
            rem = self.h + n - self.charge_weight(p)
            if rem >= 0 and rem.denominator == 1:
                for parts in partitions(int(rem)):
                    out.append((p, parts))
        return out

    def lowest(self):
        return self.basis(0)

    def h_state(self, n, s):
        """h(n) applied to a basis state."""
        p, parts = s
        if n < 0:
            return {(p, _insert_part(parts, -n)): mpq(1)}
        if n == 0:
            return {s: mpq(p)} if p else {}
        m = parts.count(n)
        if not m:
            return {}
        return {(p, _remove_part(parts, n)): mpq(self.kappa * n * m)}

    def h_mode(self, n, v):
        out = {}
        for s, c in v.items():
            out = vadd(out, self.h_state(n, s), c)
        return out

    def L_state(self, n, s):
        if n == 0:
            w = self.weight(s)
            return {s: mpq(w)} if w else {}
        # L(n) = (1/2kappa) sum_{a+b=n} h(a) h(b); for n != 0 the two modes
        # commute, so pairs a < b count twice with h(b) applied first
        p, parts = s
        pref = mpq(1) / (2 * self.kappa)
        out = {}
        bs = {b for b in parts if 2 * b > n}
        if n < 0:
            bs.update(b for b in range(n // 2 + 1 if n % 2 == 0 else (n + 1) // 2, 1))
        for b in sorted(bs):
            a = n - b
            v1 = self.h_state(b, s)
            if not v1:
                continue
            v2 = self.h_mode(a, v1)
            out = vadd(out, v2, 2 * pref)
        if n % 2 == 0:
            v1 = self.h_state(n // 2, s)
            if v1:
                out = vadd(out, self.h_mode(n // 2, v1), pref)
        return out


class FreeBosonVertexMap:
    """Intertwining operator of type (W3; W1, W2) for free-boson modules;
    with W1 the vacuum Fock space this is the module vertex operator."""

    def __init__(self, W1, W2, W3, epsilon=None):
        self.src, self.mid, self.tgt = W1, W2, W3
        self.shift = W3.h - W1.h - W2.h
        self.kappa = W2.kappa
        self.epsilon = epsilon or (lambda p1, p2: 1)
        self._memo = {}
        self._eminus = {}

    def __repr__(self):
        return "<Y type (%s; %s, %s)>" % (self.tgt.name, self.src.name, self.mid.name)

    def _target_grade(self, a, k, b):
        g = self.src.weight(a) + self.mid.weight(b) - Fraction(k) - 1 - self.tgt.h
        return g

    def mode(self, a, k, b):
        """Y_k(a) b for basis states a in W1, b in W2."""
        k = Fraction(k)
        key = (a, k, b)
        r = self._memo.get(key)
        if r is not None:
            return r
        g = self._target_grade(a, k, b)
        if g < 0 or g.denominator != 1:
            r = {}
        else:
            r = self._compute(a, k, b)
        self._memo[key] = r
        return r

    def _compute(self, a, k, b):
        p, parts = a
        if not parts:
            return self._exponential(p, k, b)
        n1 = parts[0]
        v = (p, parts[1:])
        sign_m = -1 if n1 % 2 else 1
        W2, W3 = self.mid, self.tgt
        out = {}
        # first sum: h(-n1-i) v_{k+i} b
        wv = self.src.weight(v) + W2.weight(b)
        i = 0
        while wv - (k + i) - 1 - W3.h >= 0:
            coef = comb(n1 + i - 1, i)
            inner = self.mode(v, k + i, b)
            if inner:
                out = vadd(out, W3.h_mode(-n1 - i, inner), coef)
            i += 1
        # second sum: -(-1)^m v_{m+k-i} h(i) b with m = -n1
        pb, bparts = b
        for i in [0] + sorted(set(bparts)):
            hb = W2.h_state(i, b)
            if not hb:
                continue
            coef = -sign_m * comb(n1 + i - 1, i)
            for s, c in hb.items():
                inner = self.mode(v, -n1 + k - i, s)
                if inner:
                    out = vadd(out, inner, coef * c)
        return out

    def _eminus_parts(self, p1, t):
        key = (p1, t)
        r = self._eminus.get(key)
        if r is None:
            r = []
            base = mpq(p1) / self.kappa
            for mu in partitions(t):
                c = mpq(1)
                mult = {}
                for n in mu:
                    mult[n] = mult.get(n, 0) + 1
                for n, m in mult.items():
                    c *= (base / n) ** m / factorial(m)
                if c:
                    r.append((mu, c))
            self._eminus[key] = r
        return r

    def _exponential(self, p1, k, b):
        p2, parts = b
        if p1 == 0:
            return {b: mpq(1)} if k == -1 else {}
        D = -k - 1 - Fraction(p1) * Fraction(p2) / self.kappa
        if D.denominator != 1:
            return {}
        D = int(D)
        eps = self.epsilon(p1, p2)
        # E^+ : each part size n with multiplicity m -> sum_j binom(m,j)(-p1)^j, lowering n*j
        mult = {}
        for n in parts:
            mult[n] = mult.get(n, 0) + 1
        outcomes = [((), 0, mpq(1))]
        for n, m in mult.items():
            new = []
            for kept, s, c in outcomes:
                for j in range(m + 1):
                    cj = comb(m, j) * mpq(-p1) ** j
                    new.append((kept + (n,) * (m - j), s + n * j, c * cj))
            outcomes = new
        out = {}
        ptot = Fraction(p1) + Fraction(p2)
        for kept, s, c in outcomes:
            t = D + s
            if t < 0 or not c:
                continue
            kept = tuple(sorted(kept, reverse=True))
            for mu, cm in self._eminus_parts(p1, t):
                st = (ptot, _merge(kept, mu))
                out[st] = out.get(st, 0) + c * cm * eps
        return {s: c for s, c in out.items() if c}

    def apply(self, avec, k, bvec):
        out = {}
        for a, ca in avec.items():
            for b, cb in bvec.items():
                r = self.mode(a, k, b)
                if r:
                    out = vadd(out, r, ca * cb)
        return out


# Virasoro ---------------------------------------------------------------

class VirasoroModule(GradedModule):
    """Universal vacuum module (vacuum=True, parts >= 2) or Verma module M(c, h)."""

    def __init__(self, name, c, h=0, vacuum=True, cutoff=8):
        GradedModule.__init__(self, name, h, c, cutoff)
        self.vacuum = vacuum
        if vacuum and h != 0:
            raise ValueError("vacuum module has h = 0")
        self.min_part = 2 if vacuum else 1
        self._Lmemo = {}
        self.cq = mpq(self.c)

    def grade(self, s):
        return sum(s)

    def _enumerate(self, n):
        return list(partitions(n, self.min_part))

    def L_state(self, m, s):
        key = (m, s)
        r = self._Lmemo.get(key)
        if r is not None:
            return r
        r = self._L(m, s)
        self._Lmemo[key] = r
        return r

    def _L(self, m, s):
        if not s:
            if m > 0:
                return {}
            if m == 0:
                return {s: mpq(self.h)} if self.h else {}
            if -m < self.min_part:
                return {}
            return {(-m,): mpq(1)}
        n1 = s[0]
        rest = s[1:]
        if -m >= n1:
            return {(-m,) + s: mpq(1)}
        # L(m) L(-n1) rest = L(-n1) L(m) rest + (m+n1) L(m-n1) rest + c/12 (m^3-m) delta_{m,n1} rest
        out = {}
        inner = self.L_state(m, rest)
        for t, c in inner.items():
            out = vadd(out, self.L_state(-n1, t), c)
        if m + n1:
            out = vadd(out, self.L_state(m - n1, rest), m + n1)
        if m == n1:
            out = vadd(out, {rest: mpq(1)}, self.cq * (m ** 3 - m) / 12)
        return out


class VirasoroVertexMap:
    """Module vertex operator Y(u, x) of the universal Virasoro VOA on a module W."""

    def __init__(self, V, W):
        self.src, self.mid, self.tgt = V, W, W
        self.shift = Fraction(0) - V.h
        self._memo = {}

    def __repr__(self):
        return "<Y type (%s; %s, %s)>" % (self.tgt.name, self.src.name, self.mid.name)

    def mode(self, a, k, b):
        k = Fraction(k)
        key = (a, k, b)
        r = self._memo.get(key)
        if r is not None:
            return r
        g = self.src.weight(a) + self.mid.weight(b) - k - 1 - self.tgt.h
        if g < 0 or g.denominator != 1:
            r = {}
        else:
            r = self._compute(a, k, b)
        self._memo[key] = r
        return r

    def _compute(self, a, k, b):
        W = self.mid
        if not a:
            return {b: mpq(1)} if k == -1 else {}
        n1 = a[0]
        v = a[1:]
        m = 1 - n1
        sign_m = -1 if m % 2 else 1
        out = {}
        wv = self.src.weight(v) + W.weight(b)
        i = 0
        while wv - (k + i) - 1 - W.h >= 0:
            coef = comb(n1 - 2 + i, i)
            inner = self.mode(v, k + i, b)
            if inner:
                # omega_{m-i} = L(m-i-1)
                out = vadd(out, W.L(m - i - 1, inner), coef)
            i += 1
        gb = W.grade(b)
        for i in range(0, gb + 2):
            lb = W.L_state(i - 1, b)
            if not lb:
                continue
            coef = -sign_m * comb(n1 - 2 + i, i)
            for s, c in lb.items():
                inner = self.mode(v, m + k - i, s)
                if inner:
                    out = vadd(out, inner, coef * c)
        return out

    def apply(self, avec, k, bvec):
        out = {}
        for a, ca in avec.items():
            for b, cb in bvec.items():
                r = self.mode(a, k, b)
                if r:
                    out = vadd(out, r, ca * cb)
        return out


# VOA instances ------------------------------------------------------------

class VOA:
    """A VOA V (its vacuum module) together with a family of modules."""

    def __init__(self, kind, V, omega, generators, cutoff):
        self.kind = kind
        self.V = V
        self.c = V.c
        self.omega = omega
        self.generators = generators
        self.cutoff = cutoff
        self.modules = {"V": V}
        self._maps = {}

    def vacuum(self):
        return {self.V.basis(0)[0]: mpq(1)}

    def vertex_map(self, W):
        """Module vertex operator Y_W(., x) as a type (W; V, W) map."""
        key = ("Y", W.name)
        if key not in self._maps:
            self._maps[key] = self._make_map(self.V, W, W)
        return self._maps[key]

    def module(self, label):
        return self.modules[label]

    def mode_apply(self, u, n, w, W=None):
        W = W or self.V
        return self.vertex_map(W).apply(u, n, w)

    def __repr__(self):
        return "<VOA %s c=%s>" % (self.kind, self.c)


class FreeBosonVOA(VOA):
    def __init__(self, kind, kappa, step, cutoff):
        self.kappa = Fraction(kappa)
        self.step = step
        V = FockModule("V", kappa, 0, step, cutoff)
        omega = {(Fraction(0), (1, 1)): mpq(1) / (2 * self.kappa)}
        a = {(Fraction(0), (1,)): mpq(1)}
        VOA.__init__(self, kind, V, omega, [a], cutoff)

    def a(self):
        """The weight-one generator h(-1)1."""
        return {(Fraction(0), (1,)): mpq(1)}

    def epsilon(self, p1, p2):
        if self.step is None:
            return 1
        j1 = Fraction(p1) % self.step
        b2 = (Fraction(p2) - Fraction(p2) % self.step) / self.step
        return -1 if (j1 * b2) % 2 else 1

    def _make_map(self, W1, W2, W3):
        return FreeBosonVertexMap(W1, W2, W3, self.epsilon)

    def lowest(self, W, p=None):
        p = W.p0 if p is None else Fraction(p)
        return {(p, ()): mpq(1)}


class HeisenbergVOA(FreeBosonVOA):
    def __init__(self, cutoff, charges):
        FreeBosonVOA.__init__(self, "heisenberg", 1, None, cutoff)
        for mu in charges:
            self.fock(mu)

    def fock(self, mu):
        mu = Fraction(mu)
        if mu == 0:
            return self.V
        name = "Fock(%s)" % mu
        if name not in self.modules:
            self.modules[name] = FockModule(name, 1, mu, None, self.cutoff)
        return self.modules[name]

    def intertwiner(self, mu, nu):
        """Y(e^mu, x): Fock(nu) -> Fock(mu+nu), of type (Fock(mu+nu); Fock(mu), Fock(nu))."""
        key = ("I", Fraction(mu), Fraction(nu))
        if key not in self._maps:
            self._maps[key] = FreeBosonVertexMap(self.fock(mu), self.fock(nu), self.fock(Fraction(mu) + Fraction(nu)))
        return self._maps[key]


class LatticeVOA(FreeBosonVOA):
    """V_L for L = sqrt(2N) Z.  Charges are h(0)-eigenvalues, integers; the
    sector j holds the charges congruent to j mod 2N, lowest weight
    min(j, 2N-j)^2/(4N)."""

    def __init__(self, N, cutoff):
        self.N = N
        FreeBosonVOA.__init__(self, "lattice:%d" % N, 2 * N, 2 * N, cutoff)
        for j in range(1, 2 * N):
            r = min(j, 2 * N - j)
            name = "sector(%d)" % j
            self.modules[name] = FockModule(name, 2 * N, r if j <= N else -r, 2 * N, cutoff)
        self.modules["sector(0)"] = self.V

    def sector(self, j):
        return self.modules["sector(%d)" % (j % (2 * self.N))]

    def sector_of(self, p):
        return self.sector(int(Fraction(p) % (2 * self.N)))

    def intertwiner(self, j1, j2):
        """Type (sector(j1+j2); sector(j1), sector(j2))."""
        key = ("I", j1 % (2 * self.N), j2 % (2 * self.N))
        if key not in self._maps:
            self._maps[key] = FreeBosonVertexMap(self.sector(j1), self.sector(j2), self.sector(j1 + j2), self.epsilon)
        return self._maps[key]


class VirasoroVOA(VOA):
    def __init__(self, c, cutoff):
        V = VirasoroModule("V", c, 0, True, cutoff)
        omega = {(2,): mpq(1)}
        VOA.__init__(self, "virasoro:%s" % Fraction(c), V, omega, [omega], cutoff)

    def verma(self, h):
        name = "M(%s)" % Fraction(h)
        if name not in self.modules:
            self.modules[name] = VirasoroModule(name, self.c, h, False, self.cutoff)
        return self.modules[name]

    def _make_map(self, W1, W2, W3):
        return VirasoroVertexMap(W1, W2)


def build_heisenberg(cutoff=6, charges=(0, Fraction(1, 2), 1, Fraction(3, 2), 2)):
    return HeisenbergVOA(cutoff, charges)


def build_lattice(N=1, cutoff=6):
    return LatticeVOA(N, cutoff)


def build_virasoro(c, cutoff=6):
    return VirasoroVOA(Fraction(c), cutoff)


def build(kind, cutoff=6):
    """'heisenberg', 'lattice:N' or 'virasoro:c'."""
    if kind == "heisenberg":
        return build_heisenberg(cutoff)
    if kind.startswith("lattice:"):
        return build_lattice(int(kind.split(":")[1]), cutoff)
    if kind.startswith("virasoro:"):
        return build_virasoro(Fraction(kind.split(":")[1]), cutoff)
    raise ValueError("unknown VOA kind %r" % kind)


def mode_apply(voa, u, n, w, W=None):
    """u_n w for u in V and w in W (default V)."""
    return voa.mode_apply(u, n, w, W)


def L_minus1(voa, u, W=None):
    W = W or voa.V
    return W.L(-1, u)
