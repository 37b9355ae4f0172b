"""Independent dense oracle.

Shares no code with the package: its own Gaussian rationals, bitmask exterior
algebra, first-nonzero-pivot elimination, and filtration-based Frolicher pages.
Input is the raw structure list [(target, type, i, j, (re, im))].
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations


class G:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        return G(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return G(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return G(-self.re, -self.im)

    def __mul__(self, o):
        return G(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def inv(self):
        d = self.re * self.re + self.im * self.im
        return G(self.re / d, -self.im / d)

    def conj(self):
        return G(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def scale(self, s: int):
        return G(self.re * s, self.im * s)


ZERO = G()


# --------------------------------------------------------------------------
# dense linear algebra on lists of rows


def rref(rows, ncols):
    """Row-reduce a copy; returns (reduced rows, pivot columns)."""
    m = [list(r) for r in rows]
    piv = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c].inv()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], piv


def rank_of_vectors(vectors, dim):
    if not vectors:
        return 0
    return len(rref(vectors, dim)[1])


def nullspace(rows, ncols):
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [[G(1) if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = G(1)
        for row, pc in zip(red, piv):
            x[pc] = -row[f]
        out.append(x)
    return out


def intersection(A, B, dim):
    """Basis of span(A) and span(B) intersected (both lists of vectors)."""
    if not A or not B:
        return []
    # columns [A | -B]; kernel gives combinations
    cols = A + [[-x for x in b] for b in B]
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(dim)]
    ker = nullspace(rows, len(cols))
    out = []
    for x in ker:
        v = [ZERO] * dim
        for j, a in enumerate(A):
            if x[j]:
                v = [vi + a[i] * x[j] for i, vi in enumerate(v)]
        out.append(v)
    # A may have dependent columns; reduce the spanning set to a basis
    out = [v for v in out if any(v)]
    return rref(out, dim)[0] if out else []


# --------------------------------------------------------------------------
# exterior algebra on bitmasks


def _sort_sign(seq):
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, None
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    mask = 0
    for g in seq:
        mask |= 1 << g
    return sign, mask


def _gens(mask, N):
    return [g for g in range(N) if mask >> g & 1]


class Oracle:
    def __init__(self, n, structure):
        self.n = n
        self.N = 2 * n
        dgen = {g: {} for g in range(self.N)}
        for target, typ, i, j, c in structure:
            c = G(*c) if isinstance(c, tuple) else G(c)
            a, b = {"20": (i - 1, j - 1), "11": (i - 1, n + j - 1), "02": (n + i - 1, n + j - 1)}[typ]
            self._add(dgen[target - 1], (a, b), c)
            # conjugate: swap holo/anti labels, conjugate the coefficient
            sw = lambda g: g + n if g < n else g - n
            self._add(dgen[n + target - 1], (sw(a), sw(b)), c.conj())
        self.dgen = dgen

    @staticmethod
    def _add(table, pair, c):
        s, m = _sort_sign(pair)
        if s:
            table[m] = table.get(m, ZERO) + c.scale(s)

    def bideg(self, mask):
        p = bin(mask & ((1 << self.n) - 1)).count("1")
        return p, bin(mask >> self.n).count("1")

    def d_mono(self, mask) -> dict:
        gens = _gens(mask, self.N)
        out = {}
        for pos, g in enumerate(gens):
            for dm, c in self.dgen[g].items():
                seq = gens[:pos] + _gens(dm, self.N) + gens[pos + 1:]
                s, m = _sort_sign(seq)
                if s:
                    sgn = s * (-1) ** pos
                    out[m] = out.get(m, ZERO) + c.scale(sgn)
        return {m: c for m, c in out.items() if c}

    def basis(self, p, q):
        if not (0 <= p <= self.n and 0 <= q <= self.n):
            return []
        holo = [sum(1 << g for g in s) for s in combinations(range(self.n), p)]
        anti = [sum(1 << (self.n + g) for g in s) for s in combinations(range(self.n), q)]
        return [h | a for h in holo for a in anti]

    def total_basis(self, k):
        return [sum(1 << g for g in s) for s in combinations(range(self.N), k)]

    # operators as lists of column vectors
    def _op(self, src, tgt):
        idx = {m: i for i, m in enumerate(tgt)}
        cols = []
        for m in src:
            v = [ZERO] * len(tgt)
            for mm, c in self.d_mono(m).items():
                if mm in idx:
                    v[idx[mm]] = v[idx[mm]] + c
            cols.append(v)
        return cols

    def del_(self, p, q):
        return self._op(self.basis(p, q), self.basis(p + 1, q))

    def dbar(self, p, q):
        return self._op(self.basis(p, q), self.basis(p, q + 1))

    def ddbar(self, p, q):
        cols = self.dbar(p, q)
        return [self._apply(self.basis(p, q + 1), self.basis(p + 1, q + 1), v) for v in cols]

    def _apply(self, src, tgt, v):
        idx = {m: i for i, m in enumerate(tgt)}
        out = [ZERO] * len(tgt)
        for m, x in zip(src, v):
            if not x:
                continue
            for mm, c in self.d_mono(m).items():
                if mm in idx:
                    out[idx[mm]] = out[idx[mm]] + c * x
        return out

    def d(self, k):
        return self._op(self.total_basis(k), self.total_basis(k + 1))

    @staticmethod
    def _rank(cols, dim):
        return rank_of_vectors([c for c in cols if any(c)], dim)

    def _ker(self, cols, dim_out, dim_in):
        rows = [[cols[j][i] for j in range(dim_in)] for i in range(dim_out)]
        return nullspace(rows, dim_in)

    # ---------------------------------------------------------------- dims
    def dim(self, p, q):
        return len(self.basis(p, q))

    def betti(self, k):
        if not 0 <= k <= self.N:
            return 0
        nk = len(self.total_basis(k))
        r_out = self._rank(self.d(k), len(self.total_basis(k + 1))) if k < self.N else 0
        r_in = self._rank(self.d(k - 1), nk) if k > 0 else 0
        return nk - r_out - r_in

    def _inrange(self, p, q):
        return 0 <= p <= self.n and 0 <= q <= self.n

    def _im(self, which, p, q):
        """Image vectors landing in (p,q)."""
        if which == "del":
            return self.del_(p - 1, q) if self._inrange(p - 1, q) else []
        if which == "dbar":
            return self.dbar(p, q - 1) if self._inrange(p, q - 1) else []
        return self.ddbar(p - 1, q - 1) if self._inrange(p - 1, q - 1) else []

    def dolbeault(self, p, q, which="dbar"):
        dim = self.dim(p, q)
        if which == "dbar":
            out = self.dbar(p, q)
            k = dim - self._rank(out, self.dim(p, q + 1))
        else:
            out = self.del_(p, q)
            k = dim - self._rank(out, self.dim(p + 1, q))
        return k - self._rank(self._im(which, p, q), dim)

    def _closed_basis(self, p, q):
        dim = self.dim(p, q)
        rows = []
        for cols, tdim in ((self.del_(p, q), self.dim(p + 1, q)), (self.dbar(p, q), self.dim(p, q + 1))):
            rows += [[cols[j][i] for j in range(dim)] for i in range(tdim)]
        return nullspace(rows, dim)

    def bott_chern(self, p, q):
        return len(self._closed_basis(p, q)) - self._rank(self._im("ddbar", p, q), self.dim(p, q))

    def aeppli(self, p, q):
        dim = self.dim(p, q)
        ker = dim - self._rank(self.ddbar(p, q), self.dim(p + 1, q + 1))
        return ker - self._rank(self._im("del", p, q) + self._im("dbar", p, q), dim)

    # ---------------------------------------------------------------- Frolicher by filtration
    def _filtration_cols(self, k, p):
        return [i for i, m in enumerate(self.total_basis(k)) if self.bideg(m)[0] >= p]

    def _Z(self, k, p, r):
        """Z_r^p in degree k: x in F^p with dx in F^{p+r}, as total-degree vectors."""
        tb = self.total_basis(k)
        src = self._filtration_cols(k, p)
        if r <= 0:
            return [[G(1) if i == j else ZERO for i in range(len(tb))] for j in src]
        if k == self.N:
            return [[G(1) if i == j else ZERO for i in range(len(tb))] for j in src]
        dcols = self.d(k)
        tb1 = self.total_basis(k + 1)
        bad = [i for i, m in enumerate(tb1) if self.bideg(m)[0] < p + r]
        rows = [[dcols[j][i] for j in src] for i in bad]
        out = []
        for x in nullspace(rows, len(src)):
            v = [ZERO] * len(tb)
            for j, xj in zip(src, x):
                v[j] = xj
            out.append(v)
        return out

    def frolicher(self, r, p, q):
        k = p + q
        dim = len(self.total_basis(k))
        Z = self._Z(k, p, r)
        den = list(self._Z(k, p + 1, r - 1))
        if k > 0:
            tb, tb1 = self.total_basis(k - 1), self.total_basis(k)
            for z in self._Z(k - 1, p - r + 1, r - 1):
                den.append(self._apply(tb, tb1, z))
        return self._rank(Z, dim) - self._rank(den, dim)

    def frolicher_page(self, r):
        return {(p, q): self.frolicher(r, p, q) for p in range(self.n + 1) for q in range(self.n + 1)}

    # ---------------------------------------------------------------- subspaces for hypotheses
    def _del_exact_closed(self, a, b):
        dim = self.dim(a, b)
        im = self._im("del", a, b)
        ker = self._ker(self.dbar(a, b), self.dim(a, b + 1), dim)
        return intersection([v for v in im if any(v)], ker, dim)

    def _contained(self, A, B, dim):
        return self._rank(A + B, dim) == self._rank(B, dim)

    def H(self, p, k, strong=False) -> bool:
        a, b = p + k, p - k + 1
        if not self._inrange(a, b):
            return True
        dim = self.dim(a, b)
        target = self._im("ddbar" if strong else "dbar", a, b)
        return self._contained(self._del_exact_closed(a, b), target, dim)

    def _d_exact_pure(self, a, b):
        k = a + b
        if k == 0:
            return []
        tb = self.total_basis(k)
        img = [v for v in self.d(k - 1) if any(v)]
        pure = [i for i, m in enumerate(tb) if self.bideg(m) == (a, b)]
        coord = [[G(1) if i == j else ZERO for i in range(len(tb))] for j in pure]
        inter = intersection(img, coord, len(tb))
        return [[v[i] for i in pure] for v in inter]

    def ddbar_at(self, a, b) -> bool:
        dim = self.dim(a, b)
        base = self._im("ddbar", a, b)
        spaces = [self._d_exact_pure(a, b), self._del_exact_closed(a, b)]
        dbar_im = self._im("dbar", a, b)
        ker_del = self._ker(self.del_(a, b), self.dim(a + 1, b), dim)
        spaces.append(intersection([v for v in dbar_im if any(v)], ker_del, dim))
        return all(self._contained(s, base, dim) for s in spaces)

    def ddbar_manifold(self) -> bool:
        return all(self.ddbar_at(a, b) for a in range(self.n + 1) for b in range(self.n + 1))

    def star(self, k) -> bool:
        n = self.n
        bds = set()
        for total in {k, 2 * n - k}:
            for p in range(n + 1):
                q = total - p
                if 0 <= q <= n:
                    for a, b in ((p, q), (q, p), (p + 1, q), (q + 1, p)):
                        if self._inrange(a, b):
                            bds.add((a, b))
        for a, b in bds:
            dim = self.dim(a, b)
            if not self._contained(self._del_exact_closed(a, b), self._im("ddbar", a, b), dim):
                return False
        return True

    # ---------------------------------------------------------------- induced maps
    def ker_I_dim(self, p, k):
        """BC classes in (p+k, p-k+1) that are del-exact: dim(Im del and ker dbar) - dim Im ddbar."""
        a, b = p + k, p - k + 1
        dim = self.dim(a, b)
        return len(self._del_exact_closed(a, b)) - self._rank(self._im("ddbar", a, b), dim)

    def im_That_dim(self, p, k):
        """del applied to Aeppli-closed (p+k-1, p-k+1)-forms, modulo Im ddbar."""
        a, b = p + k - 1, p - k + 1
        dim_t = self.dim(a + 1, b)
        src_dim = self.dim(a, b)
        ker = self._ker(self.ddbar(a, b), self.dim(a + 1, b + 1), src_dim)
        images = [self._apply(self.basis(a, b), self.basis(a + 1, b), v) for v in ker]
        base = self._im("ddbar", a + 1, b)
        return self._rank(images + base, dim_t) - self._rank(base, dim_t)

    def total_dimension(self):
        return 2 ** self.N

    @cached_property
    def summary(self) -> dict:
        n = self.n
        bd = [(p, q) for p in range(n + 1) for q in range(n + 1)]
        return {
            "betti": [self.betti(k) for k in range(self.N + 1)],
            "dbar": {x: self.dolbeault(*x) for x in bd},
            "del": {x: self.dolbeault(*x, which="del") for x in bd},
            "BC": {x: self.bott_chern(*x) for x in bd},
            "A": {x: self.aeppli(*x) for x in bd},
        }


def from_coframe(cf) -> Oracle:
    """Adapter: read the public structure fields only."""
    terms = [(t.target, t.type, t.i, t.j, (t.coeff.re, t.coeff.im)) for t in cf.structure]
    return Oracle(cf.n, terms)
