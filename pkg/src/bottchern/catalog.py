"""Built-in model manifolds and deformation families."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import ComplexCoframe, OperatorSet, build_operators
from .deformation import DeformationFamily, FamilyTerm, evaluate
from .errors import ParseError
from .io import parse_entry
from .scalars import ONE, GaussRat


@dataclass
class CatalogEntry:
    name: str
    kind: str  # "coframe" or "family"
    coframe: ComplexCoframe | None = None
    family: DeformationFamily | None = None
    provenance: str = ""
    expected: dict = field(default_factory=dict)
    _ops: OperatorSet | None = None

    @property
    def n(self) -> int:
        return self.coframe.n if self.coframe else self.family.n

    @property
    def central(self) -> ComplexCoframe:
        return self.coframe if self.coframe is not None else evaluate(self.family, 0)

    @property
    def ops(self) -> OperatorSet:
        if self._ops is None:
            self._ops = build_operators(self.central)
        return self._ops


def _cf(name, n, terms):
    return ComplexCoframe.from_terms(n, terms, name)


def _const(c):
    return ((0, 0, GaussRat.coerce(c)),)


def _t(c=1, power=1):
    return ((power, 0, GaussRat.coerce(c)),)


def _tbar(c=1, power=1):
    return ((0, power, GaussRat.coerce(c)),)


ZERO_POLY: tuple = ()


def _framemix(name, poly, provenance):
    # phi^1_t = phi^1 + (poly) phibar^2, phi^2_t = phi^2
    rows = (
        (_const(1), ZERO_POLY, ZERO_POLY, poly),
        (ZERO_POLY, _const(1), ZERO_POLY, ZERO_POLY),
    )
    return DeformationFamily(name, 2, (), Fraction(1, 2), rows, provenance)


def _builtin_coframes() -> dict:
    return {
        "torus2": CatalogEntry(
            "torus2", "coframe", _cf("torus2", 2, []),
            provenance="complex 2-torus, all structure constants zero",
            expected={"betti": [1, 4, 6, 4, 1]}),
        "torus3": CatalogEntry(
            "torus3", "coframe", _cf("torus3", 3, []),
            provenance="complex 3-torus, all structure constants zero",
            expected={"betti": [1, 6, 15, 20, 15, 6, 1]}),
        "iwasawa": CatalogEntry(
            "iwasawa", "coframe", _cf("iwasawa", 3, [(3, "20", 1, 2, -1)]),
            provenance="Iwasawa manifold: quotient of the complex Heisenberg group; "
                       "Nakamura, J. Differential Geom. 10 (1975)",
            expected={"betti": [1, 4, 8, 10, 8, 4, 1]}),
        "kodaira-thurston": CatalogEntry(
            "kodaira-thurston", "coframe", _cf("kodaira-thurston", 2, [(2, "11", 1, 1, 1)]),
            provenance="primary Kodaira surface (Kodaira-Thurston nilmanifold)",
            expected={"betti": [1, 3, 4, 3, 1]}),
    }


def _builtin_families() -> dict:
    fams = [
        DeformationFamily(
            "iwasawa-family", 3,
            (FamilyTerm(3, "20", 1, 2, _const(-1)), FamilyTerm(3, "11", 1, 2, _t(1))),
            Fraction(1), None,
            "holomorphic deformation d phi^3_t = -phi^1 phi^2 + t phi^1 phibar^2 of the Iwasawa model"),
        DeformationFamily(
            "iwasawa-constant", 3, (FamilyTerm(3, "20", 1, 2, _const(-1)),), Fraction(1), None,
            "constant family with every fibre the Iwasawa model"),
        DeformationFamily("torus2-family", 2, (), Fraction(1), None, "constant 2-torus family"),
        DeformationFamily("torus3-family", 3, (), Fraction(1), None, "constant 3-torus family"),
        _framemix("framemix-torus2", _t(1),
                  "2-torus with moving (1,0) frame phi^1_t = phi^1 + t phibar^2 (holomorphic in t)"),
        _framemix("framemix-torus2-smooth", _tbar(1),
                  "2-torus with moving (1,0) frame phi^1_t = phi^1 + tbar phibar^2 (smooth only)"),
    ]
    return {f.name: CatalogEntry(f.name, "family", family=f, provenance=f.provenance)
            for f in fams}


BUILTIN_COFRAMES = _builtin_coframes()
BUILTIN_FAMILIES = _builtin_families()
BUILTINS = {**BUILTIN_COFRAMES, **BUILTIN_FAMILIES}


def builtin_names() -> list[str]:
    return sorted(BUILTINS)


def load(name_or_path: str) -> CatalogEntry:
    """A built-in entry by name, or a JSON file."""
    if name_or_path in BUILTINS:
        entry = BUILTINS[name_or_path]
    elif os.path.exists(name_or_path):
        with open(name_or_path, encoding="utf-8") as fh:
            text = fh.read()
        kind, obj, raw = parse_entry(text)
        if kind == "coframe":
            entry = CatalogEntry(obj.name, kind, coframe=obj, provenance=str(raw.get("provenance", "")))
        else:
            entry = CatalogEntry(obj.name, kind, family=obj, provenance=obj.provenance)
    else:
        raise ParseError(f"no built-in entry or file named {name_or_path!r}", field="entry")
    entry.ops  # validate at load
    return entry


def load_family(name_or_path: str) -> DeformationFamily:
    entry = load(name_or_path)
    if entry.family is None:
        # a plain coframe is the constant family
        cf = entry.coframe
        terms = tuple(FamilyTerm(t.target, t.type, t.i, t.j, ((0, 0, t.coeff),))
                      for t in cf.structure)
        return DeformationFamily(cf.name, cf.n, terms, Fraction(1), None, entry.provenance)
    return entry.family


__all__ = ["CatalogEntry", "load", "load_family", "builtin_names", "BUILTINS", "ONE"]
