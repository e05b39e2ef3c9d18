"""Sparse exact row reduction over a field (mpq or Scalar entries).

Vectors are dicts key -> coefficient.  A RowSpace keeps a fully reduced
echelon basis; the pivot of each stored row is its highest-priority key, so
``reduce`` rewrites high-priority keys in terms of low-priority ones.
"""
from gmpy2 import mpq


def vadd(a, b, c=1):
    """a + c*b as a new dict."""
    out = dict(a)
    for k, v in b.items():
        w = v * c
        if k in out:
            s = out[k] + w
            if s:
                out[k] = s
            else:
                del out[k]
        elif w:
            out[k] = w
    return out


def vscale(a, c):
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def vclean(a):
    return {k: v for k, v in a.items() if v}


class RowSpace:
    def __init__(self, priority=None):
        # priority(key) -> sortable; larger means pivot first
        self.priority = priority or (lambda k: k)
        self.rows = {}  # pivot key -> row with coefficient 1 at pivot

    def __len__(self):
        return len(self.rows)

    def rank(self):
        return len(self.rows)

    def reduce(self, v):
        v = vclean(v)
        rows = self.rows
        changed = True
        while changed:
            changed = False
            for k in [k for k in v if k in rows]:
                c = v.get(k)
                if c:
                    v = vadd(v, rows[k], -c)
                    changed = True
        return v

    def add(self, v):
        """Insert v; returns True if it enlarged the span."""
        r = self.reduce(v)
        if not r:
            return False
        piv = max(r, key=self.priority)
        inv = mpq(1) / r[piv]
        r = {k: x * inv for k, x in r.items()}
        for k, row in list(self.rows.items()):
            c = row.get(piv)
            if c:
                self.rows[k] = vadd(row, r, -c)
        self.rows[piv] = r
        return True

    def contains(self, v):
        return not self.reduce(v)

    def pivots(self):
        return set(self.rows)


def solve(equations, unknowns):
    """Solve sum_u a[u] x_u = rhs for each equation dict (key 'rhs' for the
    right side).  Returns dict unknown -> value, or None if inconsistent or
    underdetermined."""
    order = {u: i + 1 for i, u in enumerate(unknowns)}
    order["rhs"] = 0
    rs = RowSpace(priority=lambda k: order[k])
    for eq in equations:
        rs.add({k: (-v if k == "rhs" else v) for k, v in eq.items()})
    if "rhs" in rs.rows:
        return None
    sol = {}
    for u in unknowns:
        row = rs.rows.get(u)
        if row is None:
            return None
        if any(k not in (u, "rhs") for k in row):
            return None
        sol[u] = -row.get("rhs", 0) if "rhs" in row else 0
    return sol


def kernel(images):
    """Null space of the linear map e_i -> images[i].

    Returns a list of coefficient dicts {i: c} spanning the kernel."""
    rs = RowSpace(priority=lambda k: (1, repr(k[1])) if k[0] == "img" else (0, k[1]))
    for i, img in enumerate(images):
        row = {("img", k): v for k, v in img.items()}
        row[("id", i)] = mpq(1)
        rs.add(row)
    out = []
    for piv, row in rs.rows.items():
        if piv[0] == "id":
            out.append({k[1]: v for k, v in row.items()})
    out.sort(key=lambda d: max(d))
    return out
