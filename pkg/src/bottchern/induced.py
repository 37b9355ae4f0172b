"""Maps between cohomology spaces induced by del or by the identity.

T      : H_A^{p,p}          -> H_dbar^{p+1,p},       [Omega]_A  -> [del Omega]
T_hat_k: H_A^{p+k-1,p-k+1}  -> H_BC^{p+k,p-k+1},     [Omega]_A  -> [del Omega]_BC
I      : H_BC^{p+k,p-k+1}   -> H_del^{p+k,p-k+1},    [Gamma]_BC -> [Gamma]_del
g_k    = I o T_hat_k
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import OperatorSet
from .cohomology import CohomologySpace, aeppli, bott_chern, dolbeault
from .errors import DomainError, InvariantViolation
from .linalg import Matrix, Subspace


@dataclass
class InducedMap:
    name: str
    source: CohomologySpace
    target: CohomologySpace
    matrix: Matrix

    @property
    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def rank(self) -> int:
        return self.matrix.rank()

    def kernel(self) -> Subspace:
        return Subspace.kernel_of(self.matrix)

    def image(self) -> Subspace:
        return Subspace.image(self.matrix)

    def __matmul__(self, other: "InducedMap") -> "InducedMap":
        if other.target.label != self.source.label:
            raise DomainError(f"cannot compose {self.name} after {other.name}")
        return InducedMap(f"{self.name}o{other.name}", other.source, self.target,
                          self.matrix @ other.matrix)


def _induce(name, source: CohomologySpace, target: CohomologySpace, f: Matrix | None) -> InducedMap:
    """Matrix of the map induced by f (None = identity) with well-definedness checks."""
    apply = (lambda v: v) if f is None else f.apply
    for v in source.kernel.basis():
        if not target.kernel.contains(apply(v)):
            raise InvariantViolation(f"{name}: image of the source kernel leaves {target.label}")
    for v in source.modding.basis():
        if not target.modding.contains(apply(v)):
            raise InvariantViolation(f"{name}: modding subspace not sent into the target's")
    cols = []
    for r in source.representatives:
        coords = target.class_of(apply(r))
        cols.append({i: c for i, c in enumerate(coords) if c})
    return InducedMap(name, source, target, Matrix(target.dimension, source.dimension, cols))


def _check_pk(ops: OperatorSet, p: int, k: int) -> None:
    if not (1 <= k <= p + 1 and p + k <= ops.n and p >= 0):
        raise DomainError(f"(p,k)=({p},{k}) out of range: need 1 <= k <= p+1 and p+k <= n={ops.n}")


def valid_pk(n: int) -> list[tuple[int, int]]:
    return [(p, k) for p in range(1, n) for k in range(1, p + 2) if p + k <= n]


def induced_T(ops: OperatorSet, p: int) -> InducedMap:
    if not 0 <= p or p + 1 > ops.n:
        raise DomainError(f"T needs 0 <= p and p+1 <= n, got p={p}")
    src = aeppli(ops, p, p)
    tgt = dolbeault(ops, p + 1, p, "dbar")
    return _induce("T", src, tgt, ops.del_(p, p))


def induced_That(ops: OperatorSet, p: int, k: int) -> InducedMap:
    _check_pk(ops, p, k)
    a, b = p + k - 1, p - k + 1
    src = aeppli(ops, a, b)
    tgt = bott_chern(ops, a + 1, b)
    return _induce(f"That_{k}", src, tgt, ops.del_(a, b))


def induced_I(ops: OperatorSet, p: int, k: int) -> InducedMap:
    _check_pk(ops, p, k)
    a, b = p + k, p - k + 1
    return _induce(f"I^{a},{b}", bott_chern(ops, a, b), dolbeault(ops, a, b, "del"), None)


def compose_g(ops: OperatorSet, p: int, k: int) -> InducedMap:
    g = induced_I(ops, p, k) @ induced_That(ops, p, k)
    g.name = f"g_{k}"
    return g


def kernel_I_equals_image_That(ops: OperatorSet, p: int, k: int) -> bool:
    return induced_I(ops, p, k).kernel() == induced_That(ops, p, k).image()
