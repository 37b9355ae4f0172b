"""Bigraded exterior algebra of an invariant coframe and its differentials.

Conventions (fixed once, used everywhere):

* The coframe is phi^1..phi^n of type (1,0) and their conjugates phibar^1..phibar^n.
  Internally these are generators 0..n-1 and n..2n-1, and a monomial
  phi^I ^ phibar^J is stored with both index tuples increasing, holomorphic
  factors first.  Basis order is lexicographic on (I, J).
* Reordering factors into canonical order contributes the Koszul sign of the
  sorting permutation.
* conj(phi^I ^ phibar^J) = phibar^I ^ phi^J = (-1)^(|I||J|) phi^J ^ phibar^I.
* d is extended from degree one by d(a ^ b) = da ^ b + (-1)^deg(a) a ^ db;
  del is its (p+1, q) component and delbar its (p, q+1) component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, NamedTuple

from .errors import DomainError, InvariantViolation, JacobiViolation, NonIntegrable
from .linalg import Matrix, Vector
from .scalars import ONE, ZERO, GaussRat

MAX_DIM = 5
TYPE_TAGS = ("20", "11", "02")


class Monomial(NamedTuple):
    holo: tuple
    anti: tuple

    @property
    def bidegree(self) -> tuple[int, int]:
        return (len(self.holo), len(self.anti))

    def generators(self, n: int) -> tuple:
        return self.holo + tuple(n + j for j in self.anti)

    def __str__(self):
        parts = [f"phi{i}" for i in self.holo] + [f"phibar{j}" for j in self.anti]
        return "^".join(parts) if parts else "1"


def _check_dim(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"complex dimension must be a positive integer, got {n!r}")
    if n > MAX_DIM:
        raise DomainError(f"complex dimension {n} exceeds the supported maximum {MAX_DIM}")


@lru_cache(maxsize=None)
def basis(n: int, p: int, q: int) -> tuple[Monomial, ...]:
    """Canonical ordered basis of Lambda^{p,q} for the n-dimensional coframe."""
    _check_dim(n)
    if not (0 <= p <= n and 0 <= q <= n):
        raise DomainError(f"bidegree ({p},{q}) out of range for n={n}")
    rng = range(1, n + 1)
    return tuple(Monomial(I, J) for I in combinations(rng, p) for J in combinations(rng, q))


@lru_cache(maxsize=None)
def basis_index(n: int, p: int, q: int) -> dict:
    return {m: k for k, m in enumerate(basis(n, p, q))}


@lru_cache(maxsize=None)
def total_basis(n: int, k: int) -> tuple[Monomial, ...]:
    """Degree-k monomials of the complexified total complex, sorted lexicographically."""
    _check_dim(n)
    if not 0 <= k <= 2 * n:
        raise DomainError(f"degree {k} out of range for n={n}")
    out = []
    for p in range(max(0, k - n), min(k, n) + 1):
        out.extend(basis(n, p, k - p))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def total_index(n: int, k: int) -> dict:
    return {m: i for i, m in enumerate(total_basis(n, k))}


def space_dim(n: int, p: int, q: int) -> int:
    if 0 <= p <= n and 0 <= q <= n:
        return comb(n, p) * comb(n, q)
    return 0


def sort_sign(seq: Iterable[int]) -> tuple[int, tuple]:
    """Sort generator indices; return (sign, sorted) or (0, ()) on a repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign, tuple(seq)


def monomial_from_generators(n: int, gens: tuple) -> Monomial:
    return Monomial(tuple(g for g in gens if g <= n),
                    tuple(g - n for g in gens if g > n))


def _gens(m: Monomial, n: int) -> tuple:
    # 1-based generator labels: holo k -> k, anti k -> n + k
    return m.holo + tuple(n + j for j in m.anti)


class Form:
    """A differential form with exact coefficients over the canonical monomials.

    ``bidegree`` is the declared type when the form is pure (or a typed zero);
    mixed forms, used for total-degree work, carry ``bidegree=None``.
    """

    __slots__ = ("n", "coeffs", "_bidegree")

    def __init__(self, n: int, coeffs: Mapping[Monomial, object] | None = None,
                 bidegree: tuple[int, int] | None = None):
        self.n = n
        clean = {}
        for m, c in (coeffs or {}).items():
            if not isinstance(m, Monomial):
                m = Monomial(tuple(m[0]), tuple(m[1]))
            c = GaussRat.coerce(c)
            if c:
                clean[m] = c
        self.coeffs = clean
        if bidegree is not None:
            bidegree = tuple(bidegree)
            for m in clean:
                if m.bidegree != bidegree:
                    raise DomainError(f"monomial {m} does not have bidegree {bidegree}")
        else:
            types = {m.bidegree for m in clean}
            if len(types) == 1:
                bidegree = types.pop()
        self._bidegree = bidegree

    # constructors -------------------------------------------------------------
    @classmethod
    def zero(cls, n, bidegree=None):
        return cls(n, {}, bidegree)

    @classmethod
    def monomial(cls, n, holo=(), anti=(), coeff=1):
        """Coefficient times phi^holo ^ phibar^anti, with the given factor order."""
        gens = tuple(holo) + tuple(n + j for j in anti)
        sign, srt = sort_sign(gens)
        p, q = len(holo), len(anti)
        if not sign:
            return cls(n, {}, (p, q))
        c = GaussRat.coerce(coeff) * sign
        return cls(n, {monomial_from_generators(n, srt): c}, (p, q))

    @classmethod
    def phi(cls, n, k):
        return cls.monomial(n, (k,), ())

    @classmethod
    def phibar(cls, n, k):
        return cls.monomial(n, (), (k,))

    @classmethod
    def from_vector(cls, n, p, q, v: Vector):
        b = basis(n, p, q)
        return cls(n, {b[i]: x for i, x in v.items()}, (p, q))

    @classmethod
    def from_total_vector(cls, n, k, v: Vector):
        b = total_basis(n, k)
        return cls(n, {b[i]: x for i, x in v.items()})

    # queries ------------------------------------------------------------------
    @property
    def bidegree(self):
        return self._bidegree

    @property
    def degree(self):
        if self._bidegree is not None:
            return sum(self._bidegree)
        degs = {len(m.holo) + len(m.anti) for m in self.coeffs}
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_zero(self) -> bool:
        return not self.coeffs

    def components(self) -> dict:
        out: dict = {}
        for m, c in self.coeffs.items():
            out.setdefault(m.bidegree, {})[m] = c
        return {bd: Form(self.n, cs, bd) for bd, cs in sorted(out.items())}

    def component(self, p, q) -> "Form":
        return Form(self.n, {m: c for m, c in self.coeffs.items() if m.bidegree == (p, q)},
                    (p, q))

    def to_vector(self, p=None, q=None) -> Vector:
        if p is None:
            if self._bidegree is None:
                raise DomainError("form has no single bidegree; pass (p, q) explicitly")
            p, q = self._bidegree
        idx = basis_index(self.n, p, q)
        out = {}
        for m, c in self.coeffs.items():
            if m not in idx:
                raise DomainError(f"monomial {m} is not of bidegree ({p},{q})")
            out[idx[m]] = c
        return out

    def to_total_vector(self, k=None) -> Vector:
        if k is None:
            k = self.degree
            if k is None:
                raise DomainError("form has no single degree")
        idx = total_index(self.n, k)
        out = {}
        for m, c in self.coeffs.items():
            if m not in idx:
                raise DomainError(f"monomial {m} is not of degree {k}")
            out[idx[m]] = c
        return out

    def conjugate(self) -> "Form":
        return conjugate(self)

    def is_real(self) -> bool:
        return conjugate(self) == self

    # arithmetic ---------------------------------------------------------------
    def _merge_bidegree(self, other):
        if self._bidegree == other._bidegree:
            return self._bidegree
        if self.is_zero():
            return other._bidegree
        if other.is_zero():
            return self._bidegree
        return None

    def __add__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        res = Form(self.n, out)
        bd = self._merge_bidegree(other)
        if bd is not None and res._bidegree is None:
            res._bidegree = bd
        return res

    def __neg__(self):
        return Form(self.n, {m: -c for m, c in self.coeffs.items()}, self._bidegree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, Form):
            return NotImplemented
        c = GaussRat.coerce(c)
        return Form(self.n, {m: c * x for m, x in self.coeffs.items()}, self._bidegree)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return f"Form(n={self.n}, 0, bidegree={self._bidegree})"
        terms = " + ".join(f"{c}*{m}" for m, c in sorted(self.coeffs.items()))
        return f"Form(n={self.n}, {terms})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"holo": list(m.holo), "anti": list(m.anti), "coeff": c.to_json()}
                      for m, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, obj) -> "Form":
        n = int(obj["n"])
        out = Form.zero(n)
        for t in obj.get("terms", []):
            out = out + Form.monomial(n, tuple(t.get("holo", [])), tuple(t.get("anti", [])),
                                      GaussRat.from_json(t["coeff"]))
        return out


BidegreeForm = Form


def wedge(a: Form, b: Form) -> Form:
    if a.n != b.n:
        raise DomainError("forms live on coframes of different dimension")
    n = a.n
    if a.bidegree is not None and b.bidegree is not None:
        p, q = a.bidegree[0] + b.bidegree[0], a.bidegree[1] + b.bidegree[1]
        if p > n or q > n:
            raise DomainError(f"wedge product bidegree ({p},{q}) exceeds n={n}")
        bd = (p, q)
    else:
        bd = None
    out: dict = {}
    for ma, ca in a.coeffs.items():
        ga = _gens(ma, n)
        for mb, cb in b.coeffs.items():
            sign, srt = sort_sign(ga + _gens(mb, n))
            if not sign:
                continue
            m = monomial_from_generators(n, srt)
            c = ca * cb if sign > 0 else -(ca * cb)
            s = out.get(m)
            out[m] = c if s is None else s + c
    return Form(n, out, bd)


def conjugate(a: Form) -> Form:
    out = {}
    for m, c in a.coeffs.items():
        c = c.conjugate()
        if (len(m.holo) * len(m.anti)) % 2:
            c = -c
        out[Monomial(m.anti, m.holo)] = c
    bd = None if a.bidegree is None else (a.bidegree[1], a.bidegree[0])
    return Form(a.n, out, bd)


# ----------------------------------------------------------------------------
# coframes


@dataclass(frozen=True)
class StructureTerm:
    """One summand c * (first factor) ^ (second factor) of d phi^target."""

    target: int
    type: str
    i: int
    j: int
    coeff: GaussRat

    def form(self, n: int) -> Form:
        if self.type == "20":
            return Form.monomial(n, (self.i, self.j), (), self.coeff)
        if self.type == "11":
            return Form.monomial(n, (self.i,), (self.j,), self.coeff)
        return Form.monomial(n, (), (self.i, self.j), self.coeff)


@dataclass(frozen=True)
class ComplexCoframe:
    n: int
    structure: tuple = field(default_factory=tuple)
    name: str = ""

    def __post_init__(self):
        _check_dim(self.n)
        object.__setattr__(self, "structure", tuple(self.structure))
        seen = set()
        for t in self.structure:
            if t.type not in TYPE_TAGS:
                raise DomainError(f"unknown structure type tag {t.type!r}")
            for idx in (t.target, t.i, t.j):
                if not 1 <= idx <= self.n:
                    raise DomainError(f"index {idx} out of range 1..{self.n}")
            if t.type in ("20", "02") and not t.i < t.j:
                raise DomainError(f"({t.type}) term for target {t.target} needs i < j")
            key = (t.target, t.type, t.i, t.j)
            if key in seen:
                raise DomainError(f"duplicate structure monomial {key}")
            seen.add(key)

    def d_phi(self, k: int) -> Form:
        out = Form.zero(self.n)
        for t in self.structure:
            if t.target == k:
                out = out + t.form(self.n)
        return out

    def is_integrable(self) -> bool:
        return all(t.type != "02" for t in self.structure if t.coeff)

    @classmethod
    def from_terms(cls, n, terms, name=""):
        """Build from (target, type, i, j, coeff) tuples."""
        return cls(n, tuple(StructureTerm(tg, ty, i, j, GaussRat.coerce(c))
                            for tg, ty, i, j, c in terms), name)


class OperatorSet:
    """Matrices of del and delbar on every Lambda^{p,q}, with identity checks."""

    def __init__(self, coframe: ComplexCoframe, del_: dict, dbar: dict):
        self.coframe = coframe
        self.n = coframe.n
        self._del = del_
        self._dbar = dbar
        self._cache: dict = {}

    def dim(self, p, q) -> int:
        return space_dim(self.n, p, q)

    def _get(self, table, p, q, dp, dq) -> Matrix:
        if (p, q) in table:
            return table[(p, q)]
        return Matrix(self.dim(p + dp, q + dq), self.dim(p, q))

    def del_(self, p, q) -> Matrix:
        """del : Lambda^{p,q} -> Lambda^{p+1,q} (zero matrix when either side is empty)."""
        return self._get(self._del, p, q, 1, 0)

    def dbar(self, p, q) -> Matrix:
        return self._get(self._dbar, p, q, 0, 1)

    def ddbar(self, p, q) -> Matrix:
        """del delbar : Lambda^{p,q} -> Lambda^{p+1,q+1}."""
        key = ("ddbar", p, q)
        if key not in self._cache:
            self._cache[key] = self.del_(p, q + 1) @ self.dbar(p, q)
        return self._cache[key]

    def d_total(self, k: int) -> Matrix:
        """d : total degree k -> k+1 over the complexified total complex."""
        key = ("d", k)
        if key in self._cache:
            return self._cache[key]
        n = self.n
        rows_dim = len(total_basis(n, k + 1)) if 0 <= k + 1 <= 2 * n else 0
        if not 0 <= k <= 2 * n:
            m = Matrix(rows_dim, 0)
        else:
            src = total_basis(n, k)
            tgt = total_index(n, k + 1) if rows_dim else {}
            cols = []
            for mono in src:
                p, q = mono.bidegree
                col = {}
                for mat, (pp, qq) in ((self.del_(p, q), (p + 1, q)), (self.dbar(p, q), (p, q + 1))):
                    if not mat.nrows:
                        continue
                    j = basis_index(n, p, q)[mono]
                    b = basis(n, pp, qq)
                    for i, x in mat.columns[j].items():
                        col[tgt[b[i]]] = x
                cols.append(col)
            m = Matrix(rows_dim, len(src), cols)
        self._cache[key] = m
        return m

    # form-level application ---------------------------------------------------
    def _apply(self, which, form: Form) -> Form:
        out = Form.zero(self.n)
        for (p, q), comp in form.components().items():
            mat = which(p, q)
            dp, dq = (1, 0) if which == self.del_ else (0, 1)
            if not mat.nrows:
                continue
            out = out + Form.from_vector(self.n, p + dp, q + dq, mat.apply(comp.to_vector()))
        if form.bidegree is not None and out.is_zero():
            p, q = form.bidegree
            dp, dq = (1, 0) if which == self.del_ else (0, 1)
            if p + dp <= self.n and q + dq <= self.n:
                return Form.zero(self.n, (p + dp, q + dq))
        return out

    def apply_del(self, form: Form) -> Form:
        return self._apply(self.del_, form)

    def apply_dbar(self, form: Form) -> Form:
        return self._apply(self.dbar, form)

    def apply_d(self, form: Form) -> Form:
        return self.apply_del(form) + self.apply_dbar(form)

    def bidegrees(self):
        return [(p, q) for p in range(self.n + 1) for q in range(self.n + 1)]

    def verify_identities(self) -> None:
        for p, q in self.bidegrees():
            if not (self.del_(p + 1, q) @ self.del_(p, q)).is_zero():
                raise JacobiViolation(f"del^2 != 0 on bidegree ({p},{q})")
            if not (self.dbar(p, q + 1) @ self.dbar(p, q)).is_zero():
                raise JacobiViolation(f"delbar^2 != 0 on bidegree ({p},{q})")
            anti = self.del_(p, q + 1) @ self.dbar(p, q) + self.dbar(p + 1, q) @ self.del_(p, q)
            if not anti.is_zero():
                raise JacobiViolation(f"del delbar + delbar del != 0 on bidegree ({p},{q})")

    def serialize(self) -> str:
        """Deterministic text dump of every operator matrix."""
        lines = []
        for p, q in self.bidegrees():
            for name, mat in (("del", self.del_(p, q)), ("dbar", self.dbar(p, q))):
                for j, col in enumerate(mat.columns):
                    for i in sorted(col):
                        lines.append(f"{name}({p},{q})[{i},{j}]={col[i]}")
        return "\n".join(lines)


def _d_generators(coframe: ComplexCoframe) -> dict:
    """d of each 1-based generator label as {sorted generator pair: coeff}."""
    n = coframe.n
    out = {}
    for k in range(1, n + 1):
        dk = coframe.d_phi(k)
        for lab, form in ((k, dk), (n + k, conjugate(dk))):
            out[lab] = {_gens(m, n): c for m, c in form.coeffs.items()}
    return out


def _d_monomial(dgen: dict, n: int, mono: Monomial) -> dict:
    seq = _gens(mono, n)
    out: dict = {}
    for pos, g in enumerate(seq):
        for pair, c in dgen[g].items():
            sign, srt = sort_sign(seq[:pos] + pair + seq[pos + 1:])
            if not sign:
                continue
            if pos % 2:
                sign = -sign
            m = monomial_from_generators(n, srt)
            val = c if sign > 0 else -c
            s = out.get(m)
            out[m] = val if s is None else s + val
    return {m: c for m, c in out.items() if c}


def d_form(coframe: ComplexCoframe, form: Form) -> Form:
    """Total exterior derivative by the Leibniz rule, without building matrices."""
    dgen = _d_generators(coframe)
    out = Form.zero(coframe.n)
    for m, c in form.coeffs.items():
        out = out + Form(coframe.n, _d_monomial(dgen, coframe.n, m)) * c
    return out


def build_operators(coframe: ComplexCoframe) -> OperatorSet:
    if not coframe.is_integrable():
        raise NonIntegrable(f"coframe {coframe.name or ''} has (0,2) structure terms")
    n = coframe.n
    dgen = _d_generators(coframe)
    for g, two in dgen.items():
        dd = Form.zero(n)
        for pair, c in two.items():
            dd = dd + Form(n, _d_monomial(dgen, n, monomial_from_generators(n, pair))) * c
        if not dd.is_zero():
            raise JacobiViolation(f"d^2 != 0 on generator {g}: structure constants do not "
                                  "define a Lie algebra differential")
    del_, dbar = {}, {}
    for p in range(n + 1):
        for q in range(n + 1):
            src = basis(n, p, q)
            dcols = [{} for _ in src]
            bcols = [{} for _ in src]
            for j, mono in enumerate(src):
                for m, c in _d_monomial(dgen, n, mono).items():
                    bd = m.bidegree
                    if bd == (p + 1, q):
                        dcols[j][basis_index(n, p + 1, q)[m]] = c
                    elif bd == (p, q + 1):
                        bcols[j][basis_index(n, p, q + 1)[m]] = c
                    else:
                        raise NonIntegrable(f"d maps ({p},{q}) into bidegree {bd}")
            del_[(p, q)] = Matrix(space_dim(n, p + 1, q), len(src), dcols)
            dbar[(p, q)] = Matrix(space_dim(n, p, q + 1), len(src), bcols)
    ops = OperatorSet(coframe, del_, dbar)
    ops.verify_identities()
    _verify_conjugation(ops)
    return ops


def _verify_conjugation(ops: OperatorSet) -> None:
    n = ops.n
    for p, q in ops.bidegrees():
        for mono in basis(n, p, q):
            f = Form(n, {mono: ONE}, (p, q))
            lhs = conjugate(ops.apply_del(f))
            rhs = ops.apply_dbar(conjugate(f))
            if lhs != rhs:
                raise InvariantViolation(f"conj(del a) != delbar(conj a) for {mono}")


def real_basis(n: int, p: int) -> list[Form]:
    """A basis of the real (conjugation-invariant) (p,p)-forms as a real vector space."""
    out = []
    for mono in basis(n, p, p):
        f = Form(n, {mono: ONE}, (p, p))
        g = conjugate(f)
        if mono.holo == mono.anti:
            # conj(c m) = conj(c) (-1)^(p^2) m, real iff c = i^(p^2) up to real scale
            c = GaussRat(0, 1) ** (p * p)
            out.append(f * c)
        elif mono.holo < mono.anti:
            out.append(f + g)
            fi = f * GaussRat(0, 1)
            out.append(fi + conjugate(fi))
    return out
