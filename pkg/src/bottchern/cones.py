"""Feasibility and membership for the cones A_p (p-SKT) and C_p (p-HS).

Linear side is exact: the admissible real (p,p)-forms form a rational
subspace S (or an affine space for membership) computed over Q.  Positivity
is imposed through sampled frame functionals in a floating LP

    maximise s   subject to   value_f(Omega) >= s  for every frame f,
                              sum over coordinate frames of value = 1,

after which the rationalised certificate is re-verified exactly on the
linear side and on a fresh sample ten times denser.  Frames where the
check fails are added as cutting planes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog

from .algebra import Form, OperatorSet, basis, real_basis
from .cohomology import aeppli
from .errors import DomainError, LPNumericalFailure, NonRealForm, TowerInfeasible
from .linalg import Matrix, Subspace, hstack, kernel, realify, solve, vec_add
from .positivity import (POSITIVE_TOL, GrassmannSample, TowerSolution, functional_rows,
                         grassmann_sample, is_swp, sampled_margin, solve_hs_tower,
                         tower_system)
from .scalars import I, ZERO, GaussRat

FEASIBLE = "FeasibleWithCertificate"
INFEASIBLE = "InfeasibleAtResolution"
CONES = ("A", "C", "K")
DEFAULT_DELTA = 1e-6
MAX_ROUNDS = 6
MAX_DENOMINATOR = 10**6


# ----------------------------------------------------------------------------
# real coordinates of real (p,p)-forms


@lru_cache(maxsize=None)
def _real_frame(n: int, p: int):
    rb = real_basis(n, p)
    E = Matrix(len(basis(n, p, p)), len(rb), [f.to_vector(p, p) for f in rb])
    return rb, E, realify(E)


def real_coordinates(form: Form, p: int) -> list[Fraction]:
    if not form.is_real():
        raise NonRealForm("form is not conjugation invariant")
    rb, E, ER = _real_frame(form.n, p)
    v = form.to_vector(p, p) if not form.is_zero() else {}
    vr = {}
    for i, x in v.items():
        if x.re:
            vr[i] = GaussRat(x.re)
        if x.im:
            vr[E.nrows + i] = GaussRat(x.im)
    x = solve(ER, vr)
    if x is None:  # pragma: no cover - real_basis spans the real forms
        raise NonRealForm("form is not in the real span")
    return [x.get(j, ZERO).re for j in range(len(rb))]


def from_real_coordinates(n: int, p: int, x) -> Form:
    rb, _, _ = _real_frame(n, p)
    out = Form.zero(n, (p, p))
    for f, c in zip(rb, x):
        if c:
            out = out + f * GaussRat(Fraction(c))
    return out


def _complex_unknowns(m: Matrix) -> Matrix:
    """Realified matrix acting on (Re z, Im z) for a complex unknown z."""
    return hstack(2 * m.nrows, realify(m), realify(m.scale(I)))


def _pad(m: Matrix, nrows: int, offset: int) -> Matrix:
    cols = [{i + offset: x for i, x in c.items()} for c in m.columns]
    return Matrix(nrows, m.ncols, cols)


def constraint_subspace(ops: OperatorSet, cone: str, p: int) -> Subspace:
    """Real coordinates x (over real_basis) of the admissible real (p,p)-forms."""
    if cone not in CONES:
        raise DomainError(f"unknown cone {cone!r}")
    _, E, _ = _real_frame(ops.n, p)
    m = E.ncols
    if cone == "A":
        return Subspace.kernel_of(realify(ops.ddbar(p, p) @ E))
    if cone == "K":
        return Subspace.kernel_of(realify(ops.del_(p, p) @ E))
    big, _, var_dims, eq_dims = tower_system(ops, p)
    rows = big.nrows
    omega_part = _pad(ops.del_(p, p) @ E, rows, 0) if eq_dims[0] else Matrix.zeros(rows, m)
    full = hstack(2 * rows, realify(omega_part), _complex_unknowns(big))
    vecs = [{j: x for j, x in v.items() if j < m} for v in kernel(full)]
    return Subspace(m, vecs)


def real_modding(ops: OperatorSet, p: int) -> list[list[Fraction]]:
    """Real coordinates spanning the real points of Im del + Im delbar in (p,p)."""
    space = aeppli(ops, p, p)
    n = ops.n
    out = []
    for v in space.modding.basis():
        f = Form.from_vector(n, p, p, v)
        for g in (f, f * I):
            r = g + g.conjugate()
            if not r.is_zero():
                out.append(real_coordinates(r, p))
    sub = Subspace(len(_real_frame(n, p)[0]), [{j: GaussRat(c) for j, c in enumerate(x) if c}
                                               for x in out])
    return [[sub_v.get(j, ZERO).re for j in range(sub.dim_ambient)] for sub_v in sub.basis()]


# ----------------------------------------------------------------------------
# reports


@dataclass
class ConeFeasibilityReport:
    cone: str
    p: int
    status: str
    certificate: Form | None = None
    tower: TowerSolution | None = None
    margin: float | None = None
    lp_value: float | None = None
    resolution: int = 0
    verification_size: int = 0
    seed: int = 0
    delta: float = DEFAULT_DELTA
    exact_empty: bool = False
    exact_positive: bool | None = None
    rounds: int = 0
    subspace_dim: int = 0
    note: str = ""

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    def to_json(self) -> dict:
        return {
            "cone": f"{self.cone}_{self.p}",
            "status": self.status,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "tower": None if self.tower is None else self.tower.to_json(),
            "margin": self.margin,
            "lp_value": self.lp_value,
            "resolution": self.resolution,
            "verification_size": self.verification_size,
            "seed": self.seed,
            "delta": self.delta,
            "exact_empty": self.exact_empty,
            "exact_positive": self.exact_positive,
            "cutting_plane_rounds": self.rounds,
            "subspace_dim": self.subspace_dim,
            "note": self.note,
        }


def _check_p(ops, p):
    if not 1 <= p <= ops.n - 1:
        raise DomainError(f"cone index p={p} out of range 1..{ops.n - 1}")


def _rationalize(y) -> list[Fraction]:
    return [Fraction(float(v)).limit_denominator(MAX_DENOMINATOR) for v in y]


def _combine(vectors, coeffs, m) -> list[Fraction]:
    out = [Fraction(0)] * m
    for v, c in zip(vectors, coeffs):
        if c:
            for j, x in v.items():
                out[j] += c * x.re
    return out


def _lp(A: np.ndarray, offset: np.ndarray | None, norm_row: np.ndarray | None):
    """maximise s with A y + offset >= s (and norm_row . y = 1 when given)."""
    k = A.shape[1]
    off = np.zeros(A.shape[0]) if offset is None else offset
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-A, np.ones((A.shape[0], 1))])
    kw = {}
    if norm_row is not None:
        kw = {"A_eq": np.concatenate([norm_row, [0.0]]).reshape(1, -1), "b_eq": [1.0]}
    bounds = [(-1e6, 1e6)] * k + [(None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=off, bounds=bounds, method="highs", **kw)
    if res.status == 2:
        return None
    if res.status != 0:
        raise LPNumericalFailure(f"HiGHS status {res.status}: {res.message}")
    return res.x[:k], float(res.x[-1])


def _linear_ok(ops, cone, p, omega) -> tuple[bool, TowerSolution | None]:
    v = omega.to_vector(p, p) if not omega.is_zero() else {}
    if cone == "A":
        return not ops.ddbar(p, p).apply(v), None
    if cone == "K":
        return not ops.del_(p, p).apply(v), None
    try:
        return True, solve_hs_tower(ops, omega)
    except TowerInfeasible:
        return False, None


def _verify_positive(omega, p, dense: GrassmannSample):
    rep = sampled_margin(omega, dense)
    exact = None
    if p in (1, omega.n - 1):
        exact = is_swp(omega, p=p).exact
    ok = rep.margin > POSITIVE_TOL and exact is not False
    return ok, rep, exact


def _empty_by_coordinate_frame(forms: list[Form], p: int) -> bool:
    """Exact: some coordinate frame functional vanishes on the whole subspace."""
    if not forms:
        return True
    n = forms[0].n
    for m in basis(n, p, p):
        if m.holo == m.anti and all(f.coeffs.get(m, ZERO) == 0 for f in forms):
            return True
    return False


def feasibility(ops: OperatorSet, cone: str, p: int, sample: GrassmannSample | None = None,
                delta: float = DEFAULT_DELTA, seed: int = 0, size: int = 2000) -> ConeFeasibilityReport:
    """Search a strictly weakly positive real (p,p)-form in the cone's linear space."""
    _check_p(ops, p)
    n = ops.n
    sample = sample or grassmann_sample(n, p, size, seed)
    seed = sample.seed
    report = ConeFeasibilityReport(cone, p, INFEASIBLE, resolution=sample.size, seed=seed,
                                   delta=delta)
    S = constraint_subspace(ops, cone, p)
    report.subspace_dim = S.dim
    m = S.dim_ambient
    basis_vecs = S.basis()
    forms = [from_real_coordinates(n, p, [v.get(j, ZERO).re for j in range(m)])
             for v in basis_vecs]
    if _empty_by_coordinate_frame(forms, p):
        report.exact_empty = True
        report.note = ("exact: a coordinate-plane value vanishes identically on the "
                       f"{S.dim}-dimensional admissible subspace, so no form is positive")
        return report
    dense = grassmann_sample(n, p, 10 * sample.size, seed + 1)
    report.verification_size = dense.size
    A = functional_rows(forms, p, sample)
    norm_row = A[: sample.n_standard].sum(axis=0)
    for rnd in range(1, MAX_ROUNDS + 1):
        report.rounds = rnd
        sol = _lp(A, None, norm_row)
        if sol is None:
            report.note = "LP infeasible at this resolution"
            return report
        y, s = sol
        report.lp_value = s
        if s <= delta:
            report.note = f"optimal sampled margin {s + 0.0:.3e} <= delta"
            return report
        coeffs = _rationalize(y)
        omega = from_real_coordinates(n, p, _combine(basis_vecs, coeffs, m))
        lin_ok, tower = _linear_ok(ops, cone, p, omega)
        if not lin_ok:  # pragma: no cover - S is exact, rationalised y stays inside
            raise LPNumericalFailure("rationalised certificate left the admissible subspace")
        ok, rep, exact = _verify_positive(omega, p, dense)
        if ok:
            report.status = FEASIBLE
            report.certificate = omega
            report.tower = tower
            report.margin = rep.margin
            report.exact_positive = exact
            return report
        cut = np.concatenate([rep.worst_frame, dense.frames[_worst(omega, p, dense)]])
        extra = GrassmannSample(n, p, cut, seed, 0)
        A = np.vstack([A, functional_rows(forms, p, extra)])
    report.note = f"certificate failed dense re-verification after {MAX_ROUNDS} rounds"
    return report


def _worst(omega, p, sample, k=16):
    from .positivity import frame_values
    vals, ok = frame_values(omega, p, sample)
    vals = np.where(ok, vals, np.inf)
    return np.argsort(vals)[:k]


# ----------------------------------------------------------------------------
# membership


@dataclass
class MembershipReport:
    cone: str
    p: int
    member: bool
    representative: Form | None = None
    tower: TowerSolution | None = None
    margin: float | None = None
    lp_value: float | None = None
    exact_nonmember: bool = False
    note: str = ""

    def to_json(self) -> dict:
        return {
            "cone": f"{self.cone}_{self.p}",
            "member": self.member,
            "representative": None if self.representative is None else self.representative.to_json(),
            "tower": None if self.tower is None else self.tower.to_json(),
            "margin": self.margin,
            "lp_value": self.lp_value,
            "exact_nonmember": self.exact_nonmember,
            "note": self.note,
        }


def real_class_representative(ops: OperatorSet, p: int, coords) -> Form:
    space = aeppli(ops, p, p)
    if len(coords) != space.dimension:
        raise DomainError(f"expected {space.dimension} class coordinates, got {len(coords)}")
    f = Form.from_vector(ops.n, p, p, space.from_coordinates(coords))
    r = (f + f.conjugate()) * GaussRat(Fraction(1, 2))
    if r.bidegree is None:
        r = Form.zero(ops.n, (p, p))
    if space.class_of(r) != [GaussRat.coerce(c) for c in coords]:
        raise NonRealForm("Aeppli class is not real")
    return r


def affine_class_space(ops: OperatorSet, cone: str, p: int, omega0: Form):
    """(particular real coords, direction basis) of admissible representatives of [omega0].

    Returns None when no representative satisfies the cone's linear constraints.
    """
    n = ops.n
    x0 = real_coordinates(omega0, p)
    mod = real_modding(ops, p)
    m = len(x0)
    if cone == "A":
        return x0, mod
    if cone != "C":
        raise DomainError("membership is implemented for the cones A and C")
    _, E, _ = _real_frame(n, p)
    big, _, var_dims, eq_dims = tower_system(ops, p)
    rows = big.nrows
    Mm = Matrix(m, len(mod), [{j: GaussRat(c) for j, c in enumerate(v) if c} for v in mod])
    dE = ops.del_(p, p) @ E
    omega_part = _pad(dE @ Mm, rows, 0) if eq_dims[0] else Matrix.zeros(rows, len(mod))
    full = hstack(2 * rows, realify(omega_part), _complex_unknowns(big))
    rhs_c = _pad(dE, rows, 0).apply({j: GaussRat(c) for j, c in enumerate(x0) if c}) \
        if eq_dims[0] else {}
    rhs = {}
    for i, x in rhs_c.items():
        if x.re:
            rhs[i] = GaussRat(-x.re)
        if x.im:
            rhs[rows + i] = GaussRat(-x.im)
    sol = solve(full, rhs)
    if sol is None:
        return None
    z0 = [sol.get(j, ZERO).re for j in range(len(mod))]
    xp = [a + b for a, b in zip(x0, _combine([{j: GaussRat(c) for j, c in enumerate(v)} for v in mod],
                                             z0, m))]
    dirs = Subspace(len(mod), [{j: x for j, x in v.items() if j < len(mod)} for v in kernel(full)])
    directions = [_combine([{j: GaussRat(c) for j, c in enumerate(v)} for v in mod],
                           [d.get(j, ZERO).re for j in range(len(mod))], m) for d in dirs.basis()]
    return xp, directions


def cone_membership(ops: OperatorSet, cone: str, p: int, aeppli_class,
                    sample: GrassmannSample | None = None, delta: float = DEFAULT_DELTA,
                    seed: int = 0, size: int = 2000) -> MembershipReport:
    """Search a strictly weakly positive representative Omega_0 + del u + delbar v."""
    _check_p(ops, p)
    n = ops.n
    sample = sample or grassmann_sample(n, p, size, seed)
    rep_form = real_class_representative(ops, p, aeppli_class)
    out = MembershipReport(cone, p, False)
    aff = affine_class_space(ops, cone, p, rep_form)
    if aff is None:
        out.exact_nonmember = True
        out.note = "exact: no representative of the class satisfies the tower equations"
        return out
    xp, dirs = aff
    base = from_real_coordinates(n, p, xp)
    dforms = [from_real_coordinates(n, p, d) for d in dirs]
    A = functional_rows(dforms, p, sample)
    b = functional_rows([base], p, sample)[:, 0]
    dense = grassmann_sample(n, p, 10 * sample.size, sample.seed + 1)
    for _ in range(MAX_ROUNDS):
        if A.shape[1] == 0:
            y, s = np.zeros(0), float(np.min(b))
        else:
            sol = _lp(A, b, None)
            if sol is None:  # pragma: no cover - s is free below, always feasible
                raise LPNumericalFailure("membership LP reported infeasible")
            y, s = sol
        out.lp_value = s
        if s <= delta:
            out.note = f"optimal sampled margin {s + 0.0:.3e} <= delta"
            return out
        coeffs = _rationalize(y)
        x = list(xp)
        for d, c in zip(dirs, coeffs):
            x = [a + c * e for a, e in zip(x, d)]
        omega = from_real_coordinates(n, p, x)
        lin_ok, tower = _linear_ok(ops, cone, p, omega)
        if not lin_ok:  # pragma: no cover
            raise LPNumericalFailure("rationalised representative left the admissible set")
        ok, rep, _ = _verify_positive(omega, p, dense)
        if ok:
            out.member = True
            out.representative = omega
            out.tower = tower
            out.margin = rep.margin
            return out
        cut = np.concatenate([rep.worst_frame, dense.frames[_worst(omega, p, dense)]])
        extra = GrassmannSample(n, p, cut, sample.seed, 0)
        A = np.vstack([A, functional_rows(dforms, p, extra)])
        b = np.concatenate([b, functional_rows([base], p, extra)[:, 0]])
    out.note = f"representative failed dense re-verification after {MAX_ROUNDS} rounds"
    return out


# ----------------------------------------------------------------------------
# equality


EQUAL = "EqualBySufficientCondition"
NOT_EQUAL = "NotEqual"
UNDETERMINED = "Undetermined"


@dataclass
class ConeEqualityReport:
    p: int
    verdict: str
    hk: dict = field(default_factory=dict)
    separator: Form | None = None
    a_report: ConeFeasibilityReport | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "verdict": self.verdict,
            "H_k": {str(k): v for k, v in sorted(self.hk.items())},
            "separator": None if self.separator is None else self.separator.to_json(),
            "A_report": None if self.a_report is None else self.a_report.to_json(),
            "note": self.note,
        }


def cone_equality(ops: OperatorSet, p: int, sample: GrassmannSample | None = None,
                  delta: float = DEFAULT_DELTA, seed: int = 0, size: int = 2000) -> ConeEqualityReport:
    from .hypotheses import hk_inclusion

    _check_p(ops, p)
    hk = {k: hk_inclusion(ops, p, k)[0] for k in range(1, p + 2)}
    out = ConeEqualityReport(p, UNDETERMINED, hk)
    if all(hk.values()):
        out.verdict = EQUAL
        out.note = "H_1 .. H_{p+1} hold"
        return out
    a = feasibility(ops, "A", p, sample, delta, seed, size)
    out.a_report = a
    if not a.feasible:
        out.note = "A_p has no certificate at this resolution; the comparison is vacuous"
        return out
    if hk[1]:
        out.note = "H_1 holds but a higher H_k fails; no separation attempted"
        return out
    cert = a.certificate
    if affine_class_space(ops, "C", p, cert) is None:
        out.verdict = NOT_EQUAL
        out.separator = cert
        out.note = ("the A_p certificate's Aeppli class has no representative with a "
                    "p-HS tower (exact), so it is not in C_p")
    else:
        out.note = "H_1 fails but the certificate class admits a tower representative"
    return out
