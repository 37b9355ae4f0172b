"""Exact decision procedures for the ∂∂̄-type hypotheses.

A d-closed (a,b)-form in Im del is handled as the subspace
Im(del : Lambda^{a-1,b}) ∩ ker(delbar on Lambda^{a,b}); del-closedness of a
del-image is automatic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Form, OperatorSet, basis, total_basis, total_index
from .cohomology import CohomologyTable
from .errors import DomainError, InvariantViolation, TowerInfeasible, WrongDimension
from .induced import induced_That, valid_pk
from .linalg import Subspace, Vector
from .scalars import ONE
from .positivity import TowerSolution, solve_hs_tower
from .spectral import frolicher, frolicher_infinity


@dataclass
class HypothesisRecord:
    name: str
    params: tuple
    verdict: bool | None
    witness: Form | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": list(self.params),
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_json(),
            "detail": self.detail,
        }


@dataclass
class HypothesisReport:
    records: list = field(default_factory=list)

    def add(self, rec: HypothesisRecord) -> HypothesisRecord:
        self.records.append(rec)
        return rec

    def to_json(self) -> list:
        return [r.to_json() for r in self.records]


def _in_range(ops, a, b):
    return 0 <= a <= ops.n and 0 <= b <= ops.n


def del_exact_closed(ops: OperatorSet, a: int, b: int) -> Subspace:
    """d-closed del-exact (a,b)-forms."""
    dim = ops.dim(a, b)
    if a == 0:
        return Subspace.zero(dim)
    return Subspace.image(ops.del_(a - 1, b)).intersect(Subspace.kernel_of(ops.dbar(a, b)))


def dbar_exact_closed(ops: OperatorSet, a: int, b: int) -> Subspace:
    dim = ops.dim(a, b)
    if b == 0:
        return Subspace.zero(dim)
    return Subspace.image(ops.dbar(a, b - 1)).intersect(Subspace.kernel_of(ops.del_(a, b)))


def ddbar_exact(ops: OperatorSet, a: int, b: int) -> Subspace:
    dim = ops.dim(a, b)
    if a == 0 or b == 0:
        return Subspace.zero(dim)
    return Subspace.image(ops.ddbar(a - 1, b - 1))


def dbar_exact(ops: OperatorSet, a: int, b: int) -> Subspace:
    dim = ops.dim(a, b)
    if b == 0:
        return Subspace.zero(dim)
    return Subspace.image(ops.dbar(a, b - 1))


def d_exact_pure(ops: OperatorSet, a: int, b: int) -> Subspace:
    """d-exact forms of pure type (a,b), in Lambda^{a,b} coordinates."""
    n, k = ops.n, a + b
    dim = ops.dim(a, b)
    if k == 0:
        return Subspace.zero(dim)
    img = Subspace.image(ops.d_total(k - 1))
    idx = total_index(n, k)
    local = basis(n, a, b)
    coord = Subspace(len(total_basis(n, k)), [{idx[m]: ONE} for m in local])
    inter = img.intersect(coord)
    pos = {idx[m]: i for i, m in enumerate(local)}
    return Subspace(dim, [{pos[j]: x for j, x in v.items()} for v in inter.basis()])


def _first_outside(space: Subspace, target: Subspace) -> Vector | None:
    for v in space.basis():
        if not target.contains(v):
            return v
    return None


def _witness_form(ops, a, b, v):
    return None if v is None else Form.from_vector(ops.n, a, b, v)


def verify_witness(ops: OperatorSet, witness: Form, strong: bool) -> bool:
    """A witness must be d-closed and del-exact but not delbar-exact (strong=False)
    or not del-delbar-exact (strong=True)."""
    a, b = witness.bidegree
    v = witness.to_vector(a, b)
    if not ops.apply_d(witness).is_zero():
        return False
    if a == 0 or not Subspace.image(ops.del_(a - 1, b)).contains(v):
        return False
    target = ddbar_exact(ops, a, b) if strong else dbar_exact(ops, a, b)
    return not target.contains(v)


def _inclusion(ops, a, b, strong) -> tuple[bool, Form | None]:
    if not _in_range(ops, a, b):
        return True, None
    src = del_exact_closed(ops, a, b)
    target = ddbar_exact(ops, a, b) if strong else dbar_exact(ops, a, b)
    w = _first_outside(src, target)
    witness = _witness_form(ops, a, b, w)
    if witness is not None and not verify_witness(ops, witness, strong):
        raise InvariantViolation(f"witness in ({a},{b}) failed re-verification")
    return w is None, witness


def check_ddbar(ops: OperatorSet, p: int, q: int) -> HypothesisRecord:
    """∂∂̄-lemma in bidegree (p,q): the four exactness subspaces coincide."""
    if not _in_range(ops, p, q):
        raise DomainError(f"bidegree ({p},{q}) out of range")
    spaces = {
        "d": d_exact_pure(ops, p, q),
        "del": del_exact_closed(ops, p, q),
        "dbar": dbar_exact_closed(ops, p, q),
        "ddbar": ddbar_exact(ops, p, q),
    }
    base = spaces["ddbar"]
    for name in ("d", "del", "dbar"):
        if not base <= spaces[name]:
            raise InvariantViolation(f"Im del delbar not inside {name}-exact in ({p},{q})")
    for name in ("d", "del", "dbar"):
        w = _first_outside(spaces[name], base)
        if w is not None:
            wf = Form.from_vector(ops.n, p, q, w)
            if not ops.apply_d(wf).is_zero():
                raise InvariantViolation("ddbar witness is not d-closed")
            return HypothesisRecord("ddbar", (p, q), False, wf,
                                    f"d-closed {name}-exact form that is not del-delbar-exact")
    return HypothesisRecord("ddbar", (p, q), True)


def check_ddbar_manifold(ops: OperatorSet) -> HypothesisRecord:
    for p in range(ops.n + 1):
        for q in range(ops.n + 1):
            rec = check_ddbar(ops, p, q)
            if not rec.verdict:
                return HypothesisRecord("ddbar_manifold", (), False, rec.witness,
                                        f"fails in bidegree ({p},{q}): {rec.detail}")
    return HypothesisRecord("ddbar_manifold", (), True)


def _check_pk(ops, p, k):
    if not (1 <= p and 1 <= k <= p + 1 and p + k <= ops.n):
        raise DomainError(f"(p,k)=({p},{k}) out of range: need 1 <= k <= p+1, p+k <= n={ops.n}")


def hk_inclusion(ops: OperatorSet, p: int, k: int, strong: bool = False):
    """(verdict, witness) for H_k (or H~_k); bidegrees outside the range hold vacuously."""
    return _inclusion(ops, p + k, p - k + 1, strong)


def check_Hk(ops: OperatorSet, p: int, k: int) -> HypothesisRecord:
    """(H_k): d-closed del-exact (p+k, p-k+1)-forms are delbar-exact."""
    _check_pk(ops, p, k)
    ok, w = hk_inclusion(ops, p, k)
    return HypothesisRecord("H_k", (p, k), ok, w)


def check_Htilde_k(ops: OperatorSet, p: int, k: int) -> HypothesisRecord:
    """(H~_k): d-closed del-exact (p+k, p-k+1)-forms are del-delbar-exact.

    Decided twice: by subspace inclusion and by T_hat_k being the zero map.
    """
    _check_pk(ops, p, k)
    ok, w = _inclusion(ops, p + k, p - k + 1, strong=True)
    via_map = induced_That(ops, p, k).is_zero
    if ok != via_map:
        raise InvariantViolation(f"H~_{k} (p={p}): inclusion test {ok} but T_hat zero = {via_map}")
    return HypothesisRecord("Htilde_k", (p, k), ok, w)


def star_bidegrees(n: int, k: int) -> list[tuple[int, int]]:
    out = set()
    for total in {k, 2 * n - k}:
        for p in range(0, n + 1):
            q = total - p
            if not 0 <= q <= n:
                continue
            for a, b in ((p, q), (q, p), (p + 1, q), (q + 1, p)):
                if 0 <= a <= n and 0 <= b <= n:
                    out.add((a, b))
    return sorted(out)


def check_star_k(ops: OperatorSet, k: int) -> HypothesisRecord:
    if not 0 <= k <= 2 * ops.n:
        raise DomainError(f"degree {k} out of range")
    for a, b in star_bidegrees(ops.n, k):
        ok, w = _inclusion(ops, a, b, strong=True)
        if not ok:
            return HypothesisRecord("star_k", (k,), False, w, f"fails in bidegree ({a},{b})")
    return HypothesisRecord("star_k", (k,), True)


@dataclass
class AngellaTomassini:
    k: int
    lhs: int
    rhs: int

    @property
    def slack(self) -> int:
        return self.rhs - self.lhs


def angella_tomassini(ops: OperatorSet, k: int, table: CohomologyTable | None = None) -> AngellaTomassini:
    table = table or CohomologyTable(ops)
    n = ops.n
    b_k = table.dim("deRham", k)
    rhs = 0
    for total in (k, 2 * n - k):
        for p in range(n + 1):
            q = total - p
            if 0 <= q <= n:
                rhs += table.dim("A", p, q)
    res = AngellaTomassini(k, 2 * b_k, rhs)
    if res.slack < 0:
        raise InvariantViolation(f"2b_{k} = {res.lhs} exceeds the Aeppli sum {rhs}")
    return res


def e1_degeneration(ops: OperatorSet) -> HypothesisRecord:
    e1 = frolicher(ops, 1)
    einf = frolicher_infinity(ops)
    ok = e1.dims == einf.dims
    bad = [bd for bd in e1.dims if e1.dims[bd] != einf.dims[bd]]
    return HypothesisRecord("E1_degeneration", (), ok,
                            detail="" if ok else f"E_1 != E_inf at {bad}")


def hypothesis_chain(ops: OperatorSet) -> HypothesisReport:
    """All named hypotheses for one operator set."""
    rep = HypothesisReport()
    rep.add(check_ddbar_manifold(ops))
    for p, k in valid_pk(ops.n):
        rep.add(check_Htilde_k(ops, p, k))
        rep.add(check_Hk(ops, p, k))
    for k in range(2 * ops.n + 1):
        rep.add(check_star_k(ops, k))
    rep.add(e1_degeneration(ops))
    return rep


@dataclass
class SktHsReport:
    solvable: bool
    ddbar_manifold: bool
    tower: TowerSolution | None = None
    closed: bool = False
    detail: str = ""

    def to_json(self) -> dict:
        return {"solvable": self.solvable, "ddbar_manifold": self.ddbar_manifold,
                "tower": None if self.tower is None else self.tower.to_json(),
                "closed": self.closed, "detail": self.detail}


def skt_hs_equivalence(ops: OperatorSet, omega: Form) -> SktHsReport:
    """Solve the HS tower for a real ∂∂̄-closed form.

    On a ∂∂̄-manifold the tower must exist; a failure there is an engine bug.
    Raises TowerInfeasible otherwise when no tower exists.
    """
    if not omega.is_real():
        from .errors import NonRealForm
        raise NonRealForm("omega must be real")
    ddbar_ok = check_ddbar_manifold(ops).verdict
    try:
        tower = solve_hs_tower(ops, omega)
    except TowerInfeasible:
        if ddbar_ok:
            raise InvariantViolation("tower infeasible on a ∂∂̄-manifold")
        raise
    closed = ops.apply_d(tower.assembled()).is_zero()
    if not closed:
        raise InvariantViolation("assembled form is not d-closed")
    return SktHsReport(True, ddbar_ok, tower, closed)


def sgg_check(ops: OperatorSet, sample=None, seed: int = 0, size: int = 2000) -> HypothesisRecord:
    """n = 3: A_2 = C_2 (the sGG property), decided through H_1 at p = 2.

    H_1 gives equality outright.  When H_1 fails, a feasible A_2 forces
    inequality; with A_2 empty at resolution the verdict is left open (None).
    """
    if ops.n != 3:
        raise WrongDimension(f"sGG check is defined for n = 3, got n = {ops.n}")
    ok, w = hk_inclusion(ops, 2, 1)
    if ok:
        return HypothesisRecord("sGG", (), True, detail="H_1 holds at p = 2")
    from .cones import feasibility
    a = feasibility(ops, "A", 2, sample, seed=seed, size=size)
    if a.feasible:
        return HypothesisRecord("sGG", (), False, w,
                                "H_1 fails at p = 2 and A_2 has a verified certificate")
    return HypothesisRecord("sGG", (), None, w, "H_1 fails but A_2 is empty at resolution")
