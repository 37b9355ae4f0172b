"""Quotient spaces: de Rham, Dolbeault, Bott-Chern and Aeppli cohomology.

Every space is computed as (kernel subspace) / (modding subspace).  The
modding subspace is row-reduced and extended greedily, in canonical basis
order, to a basis of the kernel subspace; the extension vectors are the
class representatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Form, OperatorSet, space_dim, total_basis
from .errors import DomainError, FormNotInKernel, InvariantViolation, NoClosedRepresentative
from .linalg import Matrix, Subspace, Vector, extend_basis, hstack, solve, vec_add, vstack
from .scalars import ZERO, GaussRat

KINDS = ("deRham", "dbar", "del", "BC", "A")


@dataclass
class CohomologySpace:
    kind: str
    n: int
    degree: tuple  # (k,) for de Rham, (p, q) otherwise
    kernel: Subspace
    modding: Subspace
    representatives: list = field(default_factory=list)  # list[Vector]

    def __post_init__(self):
        if not self.modding <= self.kernel:
            raise InvariantViolation(f"{self.label}: modding subspace not inside the kernel")
        cols = self.modding.basis() + self.representatives
        self._frame = Matrix(self.kernel.dim_ambient, len(cols), cols)
        self._nmod = self.modding.dim

    @property
    def label(self) -> str:
        if self.kind == "deRham":
            return f"deRham({self.degree[0]})"
        names = {"dbar": "Dolbeault-dbar", "del": "Dolbeault-del", "BC": "BottChern",
                 "A": "Aeppli"}
        p, q = self.degree
        return f"{names[self.kind]}({p},{q})"

    @property
    def dimension(self) -> int:
        return len(self.representatives)

    def representative_forms(self) -> list[Form]:
        return [self.to_form(v) for v in self.representatives]

    def to_form(self, v: Vector) -> Form:
        if self.kind == "deRham":
            return Form.from_total_vector(self.n, self.degree[0], v)
        return Form.from_vector(self.n, *self.degree, v)

    def vector_of(self, form) -> Vector:
        if isinstance(form, dict):
            return form
        if self.kind == "deRham":
            return form.to_total_vector(self.degree[0])
        return form.to_vector(*self.degree)

    def class_of(self, form) -> list[GaussRat]:
        v = self.vector_of(form)
        if not self.kernel.contains(v):
            raise FormNotInKernel(f"form is not in the defining kernel of {self.label}")
        x = solve(self._frame, v)
        if x is None:  # pragma: no cover - kernel = modding + span(reps)
            raise InvariantViolation(f"{self.label}: projector failed on a kernel element")
        return [x.get(self._nmod + i, ZERO) for i in range(self.dimension)]

    def from_coordinates(self, coords) -> Vector:
        v: dict = {}
        for c, r in zip(coords, self.representatives):
            v = vec_add(v, r, GaussRat.coerce(c))
        return v

    def is_zero_class(self, form) -> bool:
        return not any(self.class_of(form))


def _quotient(kind, n, degree, kernel: Subspace, modding: Subspace) -> CohomologySpace:
    reps = extend_basis(modding, kernel.basis())
    return CohomologySpace(kind, n, degree, kernel, modding, reps)


def _sum_images(n_rows, *mats: Matrix) -> Subspace:
    return Subspace.image(hstack(n_rows, *mats))


def derham(ops: OperatorSet, k: int) -> CohomologySpace:
    n = ops.n
    if not 0 <= k <= 2 * n:
        raise DomainError(f"degree {k} out of range 0..{2 * n}")
    dim = len(total_basis(n, k))
    ker = Subspace.kernel_of(ops.d_total(k))
    if k > 0:
        img = Subspace.image(ops.d_total(k - 1))
    else:
        img = Subspace.zero(dim)
    return _quotient("deRham", n, (k,), ker, img)


def _check_bidegree(ops, p, q):
    if not (0 <= p <= ops.n and 0 <= q <= ops.n):
        raise DomainError(f"bidegree ({p},{q}) out of range for n={ops.n}")


def dolbeault(ops: OperatorSet, p: int, q: int, which: str = "dbar") -> CohomologySpace:
    _check_bidegree(ops, p, q)
    dim = ops.dim(p, q)
    if which == "dbar":
        ker = Subspace.kernel_of(ops.dbar(p, q))
        img = Subspace.image(ops.dbar(p, q - 1)) if q > 0 else Subspace.zero(dim)
    elif which == "del":
        ker = Subspace.kernel_of(ops.del_(p, q))
        img = Subspace.image(ops.del_(p - 1, q)) if p > 0 else Subspace.zero(dim)
    else:
        raise DomainError(f"unknown Dolbeault operator {which!r}")
    return _quotient(which, ops.n, (p, q), ker, img)


def bott_chern(ops: OperatorSet, p: int, q: int) -> CohomologySpace:
    _check_bidegree(ops, p, q)
    dim = ops.dim(p, q)
    ker = Subspace.kernel_of(vstack(dim, ops.del_(p, q), ops.dbar(p, q)))
    if p > 0 and q > 0:
        img = Subspace.image(ops.ddbar(p - 1, q - 1))
    else:
        img = Subspace.zero(dim)
    return _quotient("BC", ops.n, (p, q), ker, img)


def aeppli_modding(ops: OperatorSet, p: int, q: int) -> Subspace:
    dim = ops.dim(p, q)
    mats = []
    if p > 0:
        mats.append(ops.del_(p - 1, q))
    if q > 0:
        mats.append(ops.dbar(p, q - 1))
    if not mats:
        return Subspace.zero(dim)
    return _sum_images(dim, *mats)


def aeppli(ops: OperatorSet, p: int, q: int) -> CohomologySpace:
    _check_bidegree(ops, p, q)
    ker = Subspace.kernel_of(ops.ddbar(p, q))
    img = aeppli_modding(ops, p, q)
    return _quotient("A", ops.n, (p, q), ker, img)


def cohomology(ops: OperatorSet, kind: str, p: int, q: int | None = None) -> CohomologySpace:
    if kind == "deRham":
        return derham(ops, p)
    if kind in ("dbar", "del"):
        return dolbeault(ops, p, q, kind)
    if kind == "BC":
        return bott_chern(ops, p, q)
    if kind == "A":
        return aeppli(ops, p, q)
    raise DomainError(f"unknown cohomology kind {kind!r}")


def class_of(space: CohomologySpace, form) -> list[GaussRat]:
    return space.class_of(form)


class CohomologyTable:
    """Memoized access to every cohomology space of one operator set."""

    def __init__(self, ops: OperatorSet):
        self.ops = ops
        self._cache: dict = {}

    def get(self, kind, p, q=None) -> CohomologySpace:
        key = (kind, p, q)
        if key not in self._cache:
            self._cache[key] = cohomology(self.ops, kind, p, q)
        return self._cache[key]

    def dim(self, kind, p, q=None) -> int:
        if kind != "deRham" and not (0 <= p <= self.ops.n and 0 <= q <= self.ops.n):
            return 0
        return self.get(kind, p, q).dimension

    def betti(self) -> list[int]:
        return [self.dim("deRham", k) for k in range(2 * self.ops.n + 1)]

    def hodge_table(self, kind) -> dict:
        n = self.ops.n
        return {(p, q): self.dim(kind, p, q) for p in range(n + 1) for q in range(n + 1)}


# ----------------------------------------------------------------------------
# d-closed representatives of Aeppli classes


def dclosed_representative(ops: OperatorSet, p: int, q: int, aeppli_class) -> Form:
    """Return alpha + del u + delbar v, d-closed and in the same Aeppli class.

    ``aeppli_class`` is a ∂∂̄-closed (p,q)-form or a coordinate list in the
    representative basis of ``aeppli(ops, p, q)``.  Solves
    del alpha = -del delbar v and delbar alpha = del delbar u.
    """
    space = aeppli(ops, p, q)
    if isinstance(aeppli_class, Form):
        alpha = aeppli_class.to_vector(p, q)
        if not space.kernel.contains(alpha):
            raise FormNotInKernel("form is not del-delbar-closed")
    else:
        alpha = space.from_coordinates(aeppli_class)
    out = dict(alpha)
    dalpha = ops.del_(p, q).apply(alpha)
    if dalpha:
        if q == 0:
            raise NoClosedRepresentative(f"del alpha != 0 and no (p,q-1) correction in ({p},{q})")
        v = solve(ops.ddbar(p, q - 1), {i: -x for i, x in dalpha.items()})
        if v is None:
            raise NoClosedRepresentative(f"del alpha is not del-delbar-exact in ({p + 1},{q})")
        out = vec_add(out, ops.dbar(p, q - 1).apply(v))
    dbalpha = ops.dbar(p, q).apply(alpha)
    if dbalpha:
        if p == 0:
            raise NoClosedRepresentative(f"delbar alpha != 0 and no (p-1,q) correction in ({p},{q})")
        u = solve(ops.ddbar(p - 1, q), dbalpha)
        if u is None:
            raise NoClosedRepresentative(f"delbar alpha is not del-delbar-exact in ({p},{q + 1})")
        out = vec_add(out, ops.del_(p - 1, q).apply(u))
    form = Form.from_vector(ops.n, p, q, out)
    if not ops.apply_d(form).is_zero():
        raise InvariantViolation("constructed representative is not d-closed")
    if not space.is_zero_class(form - Form.from_vector(ops.n, p, q, alpha)):
        raise InvariantViolation("constructed representative changed the Aeppli class")
    return form


@dataclass
class DeRhamMap:
    """Matrix of [alpha]_A -> {alpha}_DR on a family of Aeppli spaces."""

    sources: list  # list of (p, q)
    targets: list  # list of k
    matrix: Matrix
    well_defined: bool
    injective: bool
    isomorphism: bool


def aeppli_to_derham(ops: OperatorSet, bidegrees, degrees) -> DeRhamMap:
    """Map ⊕ H_A^{p,q} (given bidegrees) into ⊕ H_DR^k (given degrees).

    Raises NoClosedRepresentative when some representative has no d-closed
    form in its class.  ``well_defined`` records whether every d-closed
    element of Im del + Im delbar is d-exact in each source bidegree.
    """
    dr = {k: derham(ops, k) for k in degrees}
    offsets, total = {}, 0
    for k in degrees:
        offsets[k] = total
        total += dr[k].dimension
    cols = []
    well_defined = True
    for p, q in bidegrees:
        k = p + q
        if k not in dr:
            raise DomainError(f"degree {k} of bidegree ({p},{q}) not among targets")
        space = aeppli(ops, p, q)
        for rep in space.representative_forms():
            closed = dclosed_representative(ops, p, q, rep)
            coords = dr[k].class_of(closed.to_total_vector(k))
            cols.append({offsets[k] + i: c for i, c in enumerate(coords) if c})
        # closed elements of the modding space must be d-exact
        mod = space.modding
        embed = [Form.from_vector(ops.n, p, q, v).to_total_vector(k) for v in mod.basis()]
        d_on_mod = Matrix(len(total_basis(ops.n, k + 1)) if k < 2 * ops.n else 0, len(embed),
                          [ops.d_total(k).apply(v) for v in embed]) if embed else None
        if d_on_mod is not None:
            ker = Subspace.kernel_of(d_on_mod)
            img = Subspace.image(ops.d_total(k - 1)) if k > 0 else Subspace.zero(len(total_basis(ops.n, k)))
            for kv in ker.basis():
                w: dict = {}
                for idx, c in kv.items():
                    w = vec_add(w, embed[idx], c)
                if not img.contains(w):
                    well_defined = False
    m = Matrix(total, len(cols), cols)
    rank = m.rank()
    return DeRhamMap(list(bidegrees), list(degrees), m, well_defined,
                     injective=(rank == len(cols)),
                     isomorphism=(rank == len(cols) == total))
