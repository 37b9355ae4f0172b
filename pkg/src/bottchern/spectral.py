"""Frölicher spectral sequence pages by tower solvability.

E_r^{p,q} = Z_r / B_r with

Z_r: delbar-closed a in Lambda^{p,q} admitting a_1..a_{r-1}, a_l in
     Lambda^{p+l,q-l}, with del a_{l-1} = delbar a_l;
B_r: delbar Lambda^{p,q-1} + del b_0 where b_0 in Lambda^{p-1,q} starts a
     zig-zag b_0..b_{r-2}, b_j in Lambda^{p-1-j,q+j}, delbar b_{r-2} = 0 and
     delbar b_j = del b_{j+1}.

Signs in the tower equations are absorbed into the unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Form, OperatorSet
from .errors import DomainError
from .linalg import Matrix, Subspace, block_matrix, hstack, kernel, solve


@dataclass
class SpectralPage:
    r: int
    dims: dict  # (p, q) -> dim E_r^{p,q}

    def total(self, k: int) -> int:
        return sum(d for (p, q), d in self.dims.items() if p + q == k)


def _in_range(ops, p, q):
    return 0 <= p <= ops.n and 0 <= q <= ops.n


def z_space(ops: OperatorSet, p: int, q: int, r: int) -> Subspace:
    dim0 = ops.dim(p, q)
    if r <= 1:
        return Subspace.kernel_of(ops.dbar(p, q))
    # unknowns: a_0 .. a_{r-1}
    var_bd = [(p + l, q - l) for l in range(r)]
    var_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in var_bd]
    # equations: delbar a_0 = 0 ; del a_{l-1} - delbar a_l = 0 for l = 1..r-1
    eq_bd = [(p, q + 1)] + [(p + l, q - l + 1) for l in range(1, r)]
    eq_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in eq_bd]
    blocks = {(0, 0): ops.dbar(p, q)}
    for l in range(1, r):
        a, b = var_bd[l - 1]
        if var_dims[l - 1]:
            blocks[(l, l - 1)] = ops.del_(a, b)
        if var_dims[l]:
            blocks[(l, l)] = -ops.dbar(*var_bd[l])
    blocks = {k: m for k, m in blocks.items() if m.shape == (eq_dims[k[0]], var_dims[k[1]])}
    big = block_matrix(eq_dims, var_dims, blocks)
    vecs = [{i: x for i, x in v.items() if i < dim0} for v in kernel(big)]
    return Subspace(dim0, vecs)


def b_space(ops: OperatorSet, p: int, q: int, r: int) -> Subspace:
    dim0 = ops.dim(p, q)
    mats = []
    if q > 0:
        mats.append(ops.dbar(p, q - 1))
    if r >= 2 and p > 0:
        var_bd = [(p - 1 - j, q + j) for j in range(r - 1)]
        var_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in var_bd]
        # equations: delbar b_j - del b_{j+1} = 0 (j < r-2), delbar b_{r-2} = 0
        eq_bd = [(a, b + 1) for a, b in var_bd]
        eq_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in eq_bd]
        blocks = {}
        for j in range(r - 1):
            if var_dims[j]:
                blocks[(j, j)] = ops.dbar(*var_bd[j])
            if j + 1 < r - 1 and var_dims[j + 1]:
                blocks[(j, j + 1)] = -ops.del_(*var_bd[j + 1])
        blocks = {k: m for k, m in blocks.items() if m.shape == (eq_dims[k[0]], var_dims[k[1]])}
        big = block_matrix(eq_dims, var_dims, blocks)
        starts = [{i: x for i, x in v.items() if i < var_dims[0]} for v in kernel(big)]
        d0 = ops.del_(p - 1, q)
        mats.append(Matrix(dim0, len(starts), [d0.apply(s) for s in starts]))
    if not mats:
        return Subspace.zero(dim0)
    return Subspace.image(hstack(dim0, *mats))


def infinity_page_index(n: int) -> int:
    # towers and zig-zags have at most n+1 nonzero steps
    return n + 2


def frolicher(ops: OperatorSet, r: int) -> SpectralPage:
    if r < 1:
        raise DomainError("page index must be >= 1")
    dims = {}
    for p in range(ops.n + 1):
        for q in range(ops.n + 1):
            z = z_space(ops, p, q, r)
            b = b_space(ops, p, q, r)
            if not b <= z:
                from .errors import InvariantViolation
                raise InvariantViolation(f"B_{r} not inside Z_{r} in bidegree ({p},{q})")
            dims[(p, q)] = z.dim - b.dim
    return SpectralPage(r, dims)


def frolicher_infinity(ops: OperatorSet) -> SpectralPage:
    return frolicher(ops, infinity_page_index(ops.n))


def degeneration_page(ops: OperatorSet) -> int:
    """Smallest r with E_r = E_infinity."""
    inf = frolicher_infinity(ops)
    for r in range(1, infinity_page_index(ops.n) + 1):
        if frolicher(ops, r).dims == inf.dims:
            return r
    return infinity_page_index(ops.n)


def is_Ek_closed(ops: OperatorSet, form: Form, k: int) -> list[Form] | None:
    """Tower (a^{r+1,s-1}, ..., a^{r+k,s-k}) making ``form`` E_k-closed, or None.

    E_k-closed means delbar a = 0 and del a^{r+l-1,s-l+1} = delbar a^{r+l,s-l}
    for l = 1..k.  Out-of-range tower entries are zero forms.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    if form.bidegree is None:
        raise DomainError("E_k-closedness needs a pure-type form")
    r, s = form.bidegree
    alpha = form.to_vector(r, s)
    if ops.dbar(r, s).apply(alpha):
        return None
    tower = []
    if k == 0:
        return tower
    var_bd = [(r + l, s - l) for l in range(1, k + 1)]
    var_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in var_bd]
    # del a_{l-1} = delbar a_l  ->  delbar a_1 = del a ; delbar a_l - del a_{l-1} = 0
    eq_bd = [(r + l, s - l + 1) for l in range(1, k + 1)]
    eq_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in eq_bd]
    blocks = {}
    for l in range(k):
        if var_dims[l]:
            blocks[(l, l)] = ops.dbar(*var_bd[l])
        if l >= 1 and var_dims[l - 1]:
            blocks[(l, l - 1)] = -ops.del_(*var_bd[l - 1])
    blocks = {key: m for key, m in blocks.items() if m.shape == (eq_dims[key[0]], var_dims[key[1]])}
    big = block_matrix(eq_dims, var_dims, blocks)
    rhs = ops.del_(r, s).apply(alpha) if eq_dims[0] else {}
    sol = solve(big, rhs)
    if sol is None:
        return None
    off = 0
    for (a, b), d in zip(var_bd, var_dims):
        if d:
            v = {i - off: x for i, x in sol.items() if off <= i < off + d}
            tower.append(Form.from_vector(ops.n, a, b, v))
        else:
            tower.append(Form.zero(ops.n))
        off += d
    return tower
