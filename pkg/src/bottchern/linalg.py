"""Sparse exact linear algebra over Q(i).

Vectors are plain ``dict[int, GaussRat]`` with zero entries omitted.  Matrices
store their columns as such dicts, so ``M.columns[j]`` is the image of the
j-th basis vector.  Every elimination pivots on the lowest available index,
which keeps all results deterministic.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .scalars import ZERO, GaussRat

Vector = dict


def vec_add(u: Vector, v: Vector, c: GaussRat | None = None) -> Vector:
    """Return u + c*v (c defaults to 1)."""
    out = dict(u)
    for k, x in v.items():
        y = x if c is None else c * x
        s = out.get(k)
        s = y if s is None else s + y
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_scale(v: Vector, c) -> Vector:
    c = GaussRat.coerce(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_conj(v: Vector) -> Vector:
    return {k: x.conjugate() for k, x in v.items()}


def _clean(v: dict) -> Vector:
    return {k: x for k, x in v.items() if x}


class Matrix:
    __slots__ = ("nrows", "ncols", "columns")

    def __init__(self, nrows: int, ncols: int, columns: Sequence[Vector] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if columns is None:
            columns = [{} for _ in range(ncols)]
        if len(columns) != ncols:
            raise ValueError("column count mismatch")
        self.columns = [_clean(c) for c in columns]

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        one = GaussRat(1)
        return cls(n, n, [{j: one} for j in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None):
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                x = GaussRat.coerce(x)
                if x:
                    cols[j][i] = x
        return cls(nrows, ncols, cols)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Vector]):
        return cls(nrows, len(columns), list(columns))

    def rows(self) -> list[Vector]:
        rows = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                rows[i][j] = x
        return rows

    def apply(self, v: Vector) -> Vector:
        out: dict = {}
        for j, c in v.items():
            for i, x in self.columns[j].items():
                s = out.get(i)
                out[i] = x * c if s is None else s + x * c
        return _clean(out)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix(self.nrows, other.ncols, [self.apply(c) for c in other.columns])

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.nrows, self.ncols,
                      [vec_add(a, b) for a, b in zip(self.columns, other.columns)])

    def __neg__(self):
        return Matrix(self.nrows, self.ncols, [vec_scale(c, -1) for c in self.columns])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [vec_scale(col, c) for col in self.columns])

    def conjugate(self) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [vec_conj(c) for c in self.columns])

    def transpose(self) -> "Matrix":
        return Matrix(self.ncols, self.nrows, self.rows())

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.columns == other.columns

    def select_columns(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        return Matrix(self.nrows, len(idx), [self.columns[j] for j in idx])

    def tolist(self) -> list[list[GaussRat]]:
        rows = [[ZERO] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                rows[i][j] = x
        return rows

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=complex)
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                out[i, j] = complex(x)
        return out

    def rank(self) -> int:
        return len(rref(self.rows(), self.ncols)[1])

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self.columns))})"


def hstack(nrows: int, *mats: Matrix) -> Matrix:
    cols = []
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("row count mismatch in hstack")
        cols.extend(m.columns)
    return Matrix(nrows, len(cols), cols)


def vstack(ncols: int, *mats: Matrix) -> Matrix:
    cols = [{} for _ in range(ncols)]
    off = 0
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("column count mismatch in vstack")
        for j, col in enumerate(m.columns):
            for i, x in col.items():
                cols[j][off + i] = x
        off += m.nrows
    return Matrix(off, ncols, cols)


def block_matrix(row_dims: Sequence[int], col_dims: Sequence[int], blocks: dict) -> Matrix:
    """Assemble a matrix from ``{(bi, bj): Matrix}``; missing blocks are zero."""
    row_off = [0]
    for d in row_dims:
        row_off.append(row_off[-1] + d)
    col_off = [0]
    for d in col_dims:
        col_off.append(col_off[-1] + d)
    cols = [{} for _ in range(col_off[-1])]
    for (bi, bj), m in blocks.items():
        if m.shape != (row_dims[bi], col_dims[bj]):
            raise ValueError(f"block {(bi, bj)} has shape {m.shape}, "
                             f"expected {(row_dims[bi], col_dims[bj])}")
        for j, col in enumerate(m.columns):
            target = cols[col_off[bj] + j]
            for i, x in col.items():
                r = row_off[bi] + i
                s = target.get(r)
                target[r] = x if s is None else s + x
    return Matrix(row_off[-1], col_off[-1], cols)


def rref(rows: Sequence[Vector], ncols: int) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns), pivots ascending."""
    work = [dict(r) for r in rows if r]
    pivots: list[int] = []
    done: list[Vector] = []
    for c in range(ncols):
        if not work:
            break
        pick = None
        for idx, r in enumerate(work):
            if c in r:
                pick = idx
                break
        if pick is None:
            continue
        prow = work.pop(pick)
        inv = prow[c].inverse()
        prow = {k: x * inv for k, x in prow.items()}
        new_work = []
        for r in work:
            f = r.get(c)
            if f is not None:
                r = vec_add(r, prow, -f)
            if r:
                new_work.append(r)
        work = new_work
        for i, r in enumerate(done):
            f = r.get(c)
            if f is not None:
                done[i] = vec_add(r, prow, -f)
        done.append(prow)
        pivots.append(c)
    return done, pivots


def kernel(m: Matrix) -> list[Vector]:
    """Basis of the null space, one vector per free column (ascending)."""
    rows, pivots = rref(m.rows(), m.ncols)
    pivset = set(pivots)
    basis = []
    one = GaussRat(1)
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = {f: one}
        for r, p in zip(rows, pivots):
            x = r.get(f)
            if x is not None:
                v[p] = -x
        basis.append(v)
    return basis


def solve(m: Matrix, b: Vector) -> Vector | None:
    """One solution x of m x = b (free variables set to zero), or None."""
    n = m.ncols
    rows = m.rows()
    for i, x in b.items():
        rows[i] = dict(rows[i])
        rows[i][n] = x
    red, pivots = rref(rows, n + 1)
    if pivots and pivots[-1] == n:
        return None
    sol = {}
    for r, p in zip(red, pivots):
        x = r.get(n)
        if x is not None:
            sol[p] = x
    return sol


class Subspace:
    """A subspace of Q(i)^dim held as a reduced row-echelon basis."""

    __slots__ = ("dim_ambient", "rows", "pivots")

    def __init__(self, dim_ambient: int, vectors: Iterable[Vector] = ()):
        self.dim_ambient = dim_ambient
        self.rows, self.pivots = rref(list(vectors), dim_ambient)

    @classmethod
    def _raw(cls, dim_ambient, rows, pivots):
        s = cls.__new__(cls)
        s.dim_ambient = dim_ambient
        s.rows = rows
        s.pivots = pivots
        return s

    @classmethod
    def zero(cls, dim_ambient):
        return cls(dim_ambient)

    @classmethod
    def full(cls, dim_ambient):
        one = GaussRat(1)
        return cls._raw(dim_ambient, [{j: one} for j in range(dim_ambient)],
                        list(range(dim_ambient)))

    @classmethod
    def image(cls, m: Matrix) -> "Subspace":
        return cls(m.nrows, m.columns)

    @classmethod
    def kernel_of(cls, m: Matrix) -> "Subspace":
        return cls(m.ncols, kernel(m))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis(self) -> list[Vector]:
        return [dict(r) for r in self.rows]

    def reduce(self, v: Vector) -> Vector:
        out = dict(v)
        for r, p in zip(self.rows, self.pivots):
            f = out.get(p)
            if f is not None:
                out = vec_add(out, r, -f)
        return out

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def coordinates(self, v: Vector) -> list[GaussRat] | None:
        """Coefficients of v in the echelon basis, or None if v is outside."""
        if not self.contains(v):
            return None
        return [v.get(p, ZERO) for p in self.pivots]

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.dim_ambient == other.dim_ambient and self.pivots == other.pivots
                and self.rows == other.rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.dim_ambient, self.rows + other.rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.dim_ambient)
        a, b = self.rows, other.rows
        cols = list(a) + [vec_scale(w, -1) for w in b]
        ker = kernel(Matrix(self.dim_ambient, len(cols), cols))
        vecs = []
        for kv in ker:
            v: dict = {}
            for idx, c in kv.items():
                if idx < len(a):
                    v = vec_add(v, a[idx], c)
            vecs.append(v)
        return Subspace(self.dim_ambient, vecs)

    def map(self, m: Matrix) -> "Subspace":
        return Subspace(m.nrows, [m.apply(r) for r in self.rows])

    def preimage(self, m: Matrix) -> "Subspace":
        """{x : m x in self}."""
        comp = complement_projector(self)
        return Subspace.kernel_of(comp @ m)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.dim_ambient})"


def complement_projector(s: Subspace) -> Matrix:
    """Matrix whose kernel is exactly s: v -> (non-pivot coordinates of reduce(v))."""
    pivset = set(s.pivots)
    free = [j for j in range(s.dim_ambient) if j not in pivset]
    index = {j: k for k, j in enumerate(free)}
    cols = []
    for j in range(s.dim_ambient):
        red = s.reduce({j: GaussRat(1)})
        cols.append({index[k]: x for k, x in red.items()})
    return Matrix(len(free), s.dim_ambient, cols)


def extend_basis(base: Subspace, candidates: Iterable[Vector]) -> list[Vector]:
    """Greedily pick candidates (in order) independent modulo ``base``."""
    span = Subspace._raw(base.dim_ambient, list(base.rows), list(base.pivots))
    chosen = []
    for v in candidates:
        if not span.contains(v):
            chosen.append(v)
            span = Subspace(base.dim_ambient, span.rows + [v])
    return chosen


def realify(m: Matrix) -> Matrix:
    """Stack real and imaginary parts: the real-linear map R^ncols -> R^(2 nrows)."""
    cols = []
    for col in m.columns:
        out = {}
        for i, x in col.items():
            if x.re:
                out[i] = GaussRat(x.re)
            if x.im:
                out[m.nrows + i] = GaussRat(x.im)
        cols.append(out)
    return Matrix(2 * m.nrows, m.ncols, cols)


def determinant(m: Matrix) -> GaussRat:
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    rows = [list(r) for r in m.tolist()]
    n = m.nrows
    det = GaussRat(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c]), None)
        if piv is None:
            return GaussRat(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        pv = rows[c][c]
        det = det * pv
        inv = pv.inverse()
        for r in range(c + 1, n):
            f = rows[r][c]
            if f:
                f = f * inv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    return det


def inverse(m: Matrix) -> Matrix | None:
    n = m.nrows
    if n != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    cols = []
    for j in range(n):
        x = solve(m, {j: GaussRat(1)})
        if x is None:
            return None
        cols.append(x)
    inv = Matrix(n, n, cols)
    if not (m @ inv == Matrix.identity(n)):
        return None
    return inv
