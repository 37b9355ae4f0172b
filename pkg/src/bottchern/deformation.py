"""Families of invariant complex structures over exact sample points.

A family gives the structure constants of d on a coframe phi_t as
polynomials in t (and, for merely smooth families, in tbar), optionally with
an explicit change of frame

    phi^j_t = sum_k A_jk(t) phi^k + B_jk(t) phibar^k

relative to the central coframe.  Every computation at a sample point is
exact over Q(i).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .algebra import ComplexCoframe, Form, OperatorSet, build_operators, d_form
from .cohomology import CohomologyTable
from .errors import (CentralFibreNotPositive, ClosednessFailure, DomainError, FrameSingular,
                     PreconditionFailed)
from .hypotheses import check_ddbar_manifold, hk_inclusion
from .induced import valid_pk
from .linalg import Matrix, inverse
from .positivity import GrassmannSample, grassmann_sample, is_swp
from .scalars import ONE, ZERO, GaussRat

_DYADIC = [Fraction(1, 64), Fraction(1, 32), Fraction(1, 16), Fraction(1, 8), Fraction(1, 4)]
REAL_GRID = tuple([GaussRat(0)] + [GaussRat(s * x) for x in _DYADIC for s in (1, -1)])
DEFAULT_GRID = REAL_GRID + tuple(GaussRat(0, s * x) for x in _DYADIC for s in (1, -1))

Poly = tuple  # tuple of (t_power, tbar_power, GaussRat)


def eval_poly(poly: Poly, t: GaussRat) -> GaussRat:
    tb = t.conjugate()
    out = ZERO
    for a, b, c in poly:
        out = out + c * t ** a * tb ** b
    return out


def _poly_is_holomorphic(poly: Poly) -> bool:
    return all(b == 0 for _, b, _ in poly)


@dataclass(frozen=True)
class FamilyTerm:
    target: int
    type: str
    i: int
    j: int
    poly: Poly


@dataclass(frozen=True)
class DeformationFamily:
    name: str
    n: int
    terms: tuple
    domain_radius: Fraction = Fraction(1)
    frame_change: tuple | None = None  # n rows of 2n polynomials
    provenance: str = ""

    @property
    def holomorphic(self) -> bool:
        polys = [t.poly for t in self.terms]
        if self.frame_change:
            polys += [p for row in self.frame_change for p in row]
        return all(_poly_is_holomorphic(p) for p in polys)

    def check_point(self, t) -> GaussRat:
        t = GaussRat.coerce(t)
        if t.norm() > self.domain_radius ** 2:
            raise DomainError(f"|t| exceeds the domain radius {self.domain_radius}")
        return t


def evaluate(family: DeformationFamily, t) -> ComplexCoframe:
    """The coframe of the fibre at t (validated by building its operators)."""
    t = family.check_point(t)
    terms = []
    for term in family.terms:
        c = eval_poly(term.poly, t)
        if c:
            terms.append((term.target, term.type, term.i, term.j, c))
    cf = ComplexCoframe.from_terms(family.n, terms, f"{family.name}@{t}")
    build_operators(cf)
    return cf


def operators(family: DeformationFamily, t) -> OperatorSet:
    return build_operators(evaluate(family, t))


# ----------------------------------------------------------------------------
# change of frame


def frame_matrix(family: DeformationFamily, t) -> Matrix:
    """M with [phi_t; phibar_t] = M [phi; phibar] on generator labels 1..2n."""
    n = family.n
    t = family.check_point(t)
    if family.frame_change is None:
        return Matrix.identity(2 * n)
    rows = [[ZERO] * (2 * n) for _ in range(2 * n)]
    for j, row in enumerate(family.frame_change):
        for k, poly in enumerate(row):
            c = eval_poly(poly, t)
            rows[j][k] = c
            # conjugate generator: swap holo/anti blocks
            rows[n + j][(k + n) % (2 * n)] = c.conjugate()
    return Matrix.from_rows(rows, 2 * n)


def _generator(n: int, label: int) -> Form:
    return Form.phi(n, label) if label <= n else Form.phibar(n, label - n)


def substitute(form: Form, images: dict) -> Form:
    """Replace each generator label g by the 1-form images[g] (Leibniz on monomials)."""
    n = form.n
    out = Form.zero(n)
    for m, c in form.coeffs.items():
        gens = tuple(m.holo) + tuple(n + j for j in m.anti)
        term = Form(n, {((), ()): ONE})
        for g in gens:
            term = term ^ images[g]
        out = out + term * c
    return out


def _images(M: Matrix, n: int) -> dict:
    """images[g] = generator g written in the columns' coframe via M."""
    rows = M.tolist()
    out = {}
    for g in range(1, 2 * n + 1):
        f = Form.zero(n)
        for h in range(1, 2 * n + 1):
            c = rows[g - 1][h - 1]
            if c:
                f = f + _generator(n, h) * c
        out[g] = f
    return out


def rewrite(family: DeformationFamily, omega: Form, t) -> Form:
    """omega (central-frame coordinates) expressed in the coframe phi_t."""
    M = frame_matrix(family, t)
    Minv = inverse(M)
    if Minv is None:
        raise FrameSingular(f"the (1,0)_t frame degenerates at t = {t}")
    return substitute(omega, _images(Minv, family.n))


def restore(family: DeformationFamily, form_t: Form, t) -> Form:
    """Inverse of rewrite."""
    return substitute(form_t, _images(frame_matrix(family, t), family.n))


def project_pp(family: DeformationFamily, omega: Form, t, p: int | None = None) -> Form:
    """J_t-type (p,p) component of a 2p-form given in central-frame coordinates."""
    deg = omega.degree
    if omega.is_zero():
        if p is None:
            raise DomainError("pass p for the zero form")
        return Form.zero(family.n, (p, p))
    if deg is None or deg % 2:
        raise DomainError("omega must be a form of even total degree 2p")
    p = deg // 2 if p is None else p
    if 2 * p != deg:
        raise DomainError(f"degree {deg} does not match p={p}")
    return rewrite(family, omega, t).component(p, p)


def check_frame_consistency(family: DeformationFamily, t) -> None:
    """d of the moving coframe, computed on the central fibre, must match the
    structure constants declared at t."""
    if family.frame_change is None:
        return
    n = family.n
    central = evaluate(family, GaussRat(0))
    fibre = evaluate(family, t)
    M = frame_matrix(family, t)
    Minv = inverse(M)
    if Minv is None:
        raise FrameSingular(f"the (1,0)_t frame degenerates at t = {t}")
    imgs = _images(Minv, n)
    moving = _images(M, n)
    for j in range(1, n + 1):
        lhs = substitute(d_form(central, moving[j]), imgs)
        rhs = fibre.d_phi(j)
        if lhs != rhs:
            raise PreconditionFailed(f"frame change and structure constants disagree at t = {t} "
                                     f"for phi^{j}")


# ----------------------------------------------------------------------------
# sweeps


HODGE_LABELS = ("A", "BC", "del", "dbar")


def _key(label, p, q=None):
    return f"{label}({p})" if q is None else f"{label}({p},{q})"


@dataclass
class SweepPoint:
    t: GaussRat
    dims: dict
    verdicts: dict


@dataclass
class SweepReport:
    family: str
    grid: list
    points: list
    constant: dict = field(default_factory=dict)
    upper_semicontinuous: dict = field(default_factory=dict)
    near: list = field(default_factory=list)

    def values(self, key) -> list:
        return [pt.dims.get(key, pt.verdicts.get(key)) for pt in self.points]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "grid": [t.to_json() for t in self.grid],
            "near_points": [t.to_json() for t in self.near],
            "points": [{"t": pt.t.to_json(), "dims": pt.dims, "verdicts": pt.verdicts}
                       for pt in self.points],
            "constant": self.constant,
            "upper_semicontinuous": self.upper_semicontinuous,
        }


def near_points(grid) -> list:
    """Points with the two smallest nonzero magnitudes."""
    mags = sorted({t.norm() for t in grid if t})
    keep = set(mags[:2])
    return [t for t in grid if t and t.norm() in keep]


def sweep(family: DeformationFamily, grid=REAL_GRID, bidegrees=None,
          hypotheses: bool = True) -> SweepReport:
    grid = [family.check_point(t) for t in grid]
    n = family.n
    if bidegrees is None:
        bidegrees = [(p, q) for p in range(n + 1) for q in range(n + 1)]
    points = []
    for t in grid:
        ops = operators(family, t)
        check_frame_consistency(family, t)
        table = CohomologyTable(ops)
        dims = {_key("b", k): table.dim("deRham", k) for k in range(2 * n + 1)}
        for label in HODGE_LABELS:
            for p, q in bidegrees:
                dims[_key(label, p, q)] = table.dim(label, p, q)
        verdicts = {}
        if hypotheses:
            verdicts["ddbar"] = check_ddbar_manifold(ops).verdict
            for p, k in valid_pk(n):
                verdicts[f"H_{k}(p={p})"] = hk_inclusion(ops, p, k)[0]
                verdicts[f"Htilde_{k}(p={p})"] = hk_inclusion(ops, p, k, strong=True)[0]
        points.append(SweepPoint(t, dims, verdicts))
    rep = SweepReport(family.name, grid, points, near=near_points(grid))
    keys = list(points[0].dims) + list(points[0].verdicts) if points else []
    for key in keys:
        vals = rep.values(key)
        rep.constant[key] = all(v == vals[0] for v in vals)
    zero = [pt for pt in points if not pt.t]
    near = {t for t in rep.near}
    if zero:
        for key in points[0].dims:
            if key.startswith("b("):
                continue
            h0 = zero[0].dims[key]
            rep.upper_semicontinuous[key] = all(pt.dims[key] <= h0 for pt in points
                                                if pt.t in near)
    return rep


# ----------------------------------------------------------------------------
# openness of positivity under type projection


@dataclass
class OpennessReport:
    family: str
    p: int
    omega: Form
    margins: list  # list of (t, margin)
    certified_radius: float
    refined: list = field(default_factory=list)
    holomorphic: bool = True

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "p": self.p,
            "omega": self.omega.to_json(),
            "margins": [{"t": t.to_json(), "margin": m} for t, m in self.margins],
            "certified_radius": self.certified_radius,
            "refined_points": [t.to_json() for t in self.refined],
            "holomorphic_family": self.holomorphic,
        }


def _margin_at(family, omega, p, t, sample):
    ops = operators(family, t)
    check_frame_consistency(family, t)
    rewritten = rewrite(family, omega, t)
    if not ops.apply_d(rewritten).is_zero():
        raise ClosednessFailure(f"d_t Omega != 0 at t = {t}", t=t)
    proj = rewritten.component(p, p)
    return is_swp(proj, sample, p=p).margin


def _rays(grid):
    """Group grid points by direction, each ray sorted by magnitude and starting at 0."""
    rays: dict = {}
    for t in grid:
        if not t:
            continue
        mag2 = t.norm()
        # exact direction key: component signs plus the slope im/re
        key = (t.re / abs(t.re) if t.re else 0, t.im / abs(t.im) if t.im else 0,
               (t.im / t.re) if t.re else None)
        rays.setdefault(key, []).append((mag2, t))
    return [[GaussRat(0)] + [t for _, t in sorted(v, key=lambda x: x[0])] for v in rays.values()]


def openness_demo(family: DeformationFamily, omega: Form, grid=DEFAULT_GRID,
                  sample: GrassmannSample | None = None, delta: float = 1e-6,
                  max_refine: int = 6, seed: int = 0, size: int = 2000) -> OpennessReport:
    deg = omega.degree
    if deg is None or deg % 2:
        raise DomainError("omega must have even total degree")
    if not omega.is_real():
        from .errors import NonRealForm
        raise NonRealForm("omega must be real")
    p = deg // 2
    n = family.n
    if sample is None and p not in (1, n - 1, n):
        sample = grassmann_sample(n, p, size, seed)
    grid = [family.check_point(t) for t in grid]
    if GaussRat(0) not in grid:
        grid = [GaussRat(0)] + grid
    cache = {}

    def margin(t):
        if t not in cache:
            cache[t] = _margin_at(family, omega, p, t, sample)
        return cache[t]

    if margin(GaussRat(0)) <= 1e-9:
        raise CentralFibreNotPositive(f"projected form at t = 0 has margin {margin(GaussRat(0))}")
    refined = []
    for ray in _rays(grid):
        i = 0
        pts = list(ray)
        depth = {t: 0 for t in pts}
        while i < len(pts) - 1:
            a, b = pts[i], pts[i + 1]
            ma, mb = margin(a), margin(b)
            if ma > delta and mb < -delta and max(depth[a], depth[b]) < max_refine:
                mid = (a + b) * GaussRat(Fraction(1, 2))
                depth[mid] = max(depth[a], depth[b]) + 1
                pts.insert(i + 1, mid)
                refined.append(mid)
                continue
            i += 1
    for t in grid:
        margin(t)
    ordered = sorted(cache.items(), key=lambda kv: (kv[0].norm(), kv[0].re, kv[0].im))
    radius2 = Fraction(0)
    for mag2 in sorted({t.norm() for t, _ in ordered}):
        if all(m > 1e-9 for t, m in ordered if t.norm() <= mag2):
            radius2 = mag2
        else:
            break
    return OpennessReport(family.name, p, omega, [(t, m) for t, m in ordered
                                                  if t in set(grid) or t in set(refined)],
                          float(radius2) ** 0.5, refined, family.holomorphic)


# ----------------------------------------------------------------------------
# limit checks


CONSISTENT = "CONSISTENT"
COUNTEREXAMPLE = "COUNTEREXAMPLE-AT-SAMPLE"
INAPPLICABLE = "INAPPLICABLE"


@dataclass
class LimitReport:
    family: str
    p: int
    k: int | None
    status: str
    hypotheses_hold: bool
    dims_constant: bool
    per_t: dict
    at_zero: object
    note: str = ""

    def to_json(self) -> dict:
        return {"family": self.family, "p": self.p, "k": self.k, "status": self.status,
                "hypotheses_hold": self.hypotheses_hold, "dims_constant": self.dims_constant,
                "per_t": self.per_t, "at_zero": self.at_zero, "note": self.note}


def _limit_dims(ops, p, k):
    n = ops.n
    table = CohomologyTable(ops)

    def d(label, a, b):
        return table.dim(label, a, b) if 0 <= a <= n and 0 <= b <= n else 0
    return (d("A", p + k - 1, p - k + 1), d("BC", p + k, p - k + 1), d("del", p + k, p - k + 1))


def limit_check_Htilde(family: DeformationFamily, p: int, k: int, grid=REAL_GRID) -> LimitReport:
    """Sampled form of the closedness of (H~_k) under deformation limits."""
    grid = [family.check_point(t) for t in grid]
    near = set(near_points(grid))
    per_t, dims = {}, {}
    for t in grid:
        ops = operators(family, t)
        per_t[str(t)] = hk_inclusion(ops, p, k, strong=True)[0]
        dims[t] = _limit_dims(ops, p, k)
    zero = GaussRat(0)
    if zero not in dims:
        ops0 = operators(family, zero)
        dims[zero] = _limit_dims(ops0, p, k)
        per_t[str(zero)] = hk_inclusion(ops0, p, k, strong=True)[0]
    hyp = all(v for t, v in per_t.items() if t != str(zero))
    const = all(dims[t] == dims[zero] for t in near)
    at_zero = per_t[str(zero)]
    if not const:
        status, note = INAPPLICABLE, "dimension constancy fails near 0; the limit statement does not apply"
    elif not hyp:
        status, note = INAPPLICABLE, "H~_k fails at some sampled t != 0; the check is vacuous"
    elif at_zero:
        status, note = CONSISTENT, "hypotheses hold on the sample and H~_k holds at 0"
    else:
        status, note = COUNTEREXAMPLE, ("hypotheses hold on the sample but H~_k fails at 0: "
                                        "an engine bug or a family outside the hypotheses, "
                                        "never a disproof")
    return LimitReport(family.name, p, k, status, hyp, const, per_t, at_zero, note)


WITNESSED = "WITNESSED"
NOT_WITNESSED = "NOT-WITNESSED"


def cone_limit_check(family: DeformationFamily, p: int, grid=REAL_GRID,
                     sample: GrassmannSample | None = None, seed: int = 0,
                     size: int = 2000) -> LimitReport:
    from .cones import EQUAL, cone_equality

    grid = [family.check_point(t) for t in grid]
    near = set(near_points(grid))
    zero = GaussRat(0)
    per_t, hyp, const = {}, True, True
    ops_at = {t: operators(family, t) for t in set(grid) | {zero}}
    for k in range(1, p + 2):
        d0 = _limit_dims(ops_at[zero], p, k)
        for t in grid:
            if t:
                ok = hk_inclusion(ops_at[t], p, k, strong=True)[0]
                per_t[f"Htilde_{k}@{t}"] = ok
                hyp = hyp and ok
            if t in near and _limit_dims(ops_at[t], p, k) != d0:
                const = False
    if not (hyp and const):
        return LimitReport(family.name, p, None, INAPPLICABLE, hyp, const, per_t, None,
                           "hypotheses of the limit statement fail on the sample; no claim")
    eq = cone_equality(ops_at[zero], p, sample, seed=seed, size=size)
    status = WITNESSED if eq.verdict == EQUAL else NOT_WITNESSED
    return LimitReport(family.name, p, None, status, hyp, const, per_t, eq.verdict,
                       "cone equality at 0 " + ("witnessed" if status == WITNESSED
                                                else "not witnessed: " + eq.note))
