"""JSON input schema and deterministic report serialisation."""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .algebra import ComplexCoframe, Form, Monomial
from .errors import ParseError
from .scalars import GaussRat

TYPES = ("20", "11", "02")


# ----------------------------------------------------------------------------
# output


def _jsonable(obj):
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {_key(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False)


# ----------------------------------------------------------------------------
# input


def _line_of(text: str, needle: str) -> int | None:
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


class _Ctx:
    def __init__(self, text: str):
        self.text = text

    def fail(self, msg, field, needle=None):
        line = _line_of(self.text, needle) if needle else None
        raise ParseError(msg, line=line, field=field)


def parse_rational(s, field: str = "", ctx: _Ctx | None = None) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        (ctx or _Ctx("")).fail("floats are not allowed; use a 'num/den' string", field)
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        (ctx or _Ctx("")).fail(f"expected a rational string, got {s!r}", field)
    try:
        if "." in s or "e" in s.lower():
            raise ValueError
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        (ctx or _Ctx("")).fail(f"invalid rational {s!r}", field, s)


def parse_scalar(obj, field: str = "", ctx: _Ctx | None = None) -> GaussRat:
    if isinstance(obj, dict):
        extra = set(obj) - {"re", "im"}
        if extra:
            (ctx or _Ctx("")).fail(f"unknown keys {sorted(extra)}", field)
        return GaussRat(parse_rational(obj.get("re", "0"), field + ".re", ctx),
                        parse_rational(obj.get("im", "0"), field + ".im", ctx))
    return GaussRat(parse_rational(obj, field, ctx))


def parse_poly(obj, field: str, ctx: _Ctx) -> tuple:
    """[{"t_power", "tbar_power"?, "re", "im"}] or a constant scalar."""
    if isinstance(obj, dict) and "t_power" not in obj:
        return ((0, 0, parse_scalar(obj, field, ctx)),)
    if isinstance(obj, (str, int)):
        return ((0, 0, parse_scalar(obj, field, ctx)),)
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        ctx.fail("expected a polynomial term list", field)
    out = []
    for i, term in enumerate(obj):
        f = f"{field}[{i}]"
        if not isinstance(term, dict):
            ctx.fail("polynomial terms must be objects", f)
        a = term.get("t_power", 0)
        b = term.get("tbar_power", 0)
        if not (isinstance(a, int) and isinstance(b, int)) or a < 0 or b < 0:
            ctx.fail("powers must be nonnegative integers", f)
        out.append((a, b, parse_scalar({k: v for k, v in term.items() if k in ("re", "im")}, f, ctx)))
    return tuple(out)


def _require(obj, key, kind, field, ctx):
    if key not in obj:
        ctx.fail(f"missing field {key!r}", f"{field}.{key}" if field else key)
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        ctx.fail(f"field {key!r} must be an integer", f"{field}.{key}" if field else key, f'"{key}"')
    if kind is str and not isinstance(val, str):
        ctx.fail(f"field {key!r} must be a string", key, f'"{key}"')
    if kind is list and not isinstance(val, list):
        ctx.fail(f"field {key!r} must be a list", key, f'"{key}"')
    return val


def loads_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None


def parse_entry(text: str):
    """Coframe or family from the JSON schema.  Returns (kind, object, raw dict)."""
    from .deformation import DeformationFamily, FamilyTerm

    ctx = _Ctx(text)
    obj = loads_json(text)
    if not isinstance(obj, dict):
        ctx.fail("top level must be an object", "")
    name = _require(obj, "name", str, "", ctx)
    n = _require(obj, "n", int, "", ctx)
    if not 1 <= n <= 5:
        ctx.fail(f"n must be in 1..5, got {n}", "n", '"n"')
    structure = _require(obj, "structure", list, "", ctx)
    is_family = "domain_radius" in obj or "frame_change" in obj or any(
        isinstance(s, dict) and ("polynomial" in s or isinstance(s.get("coeff"), list))
        for s in structure)
    terms = []
    for idx, s in enumerate(structure):
        f = f"structure[{idx}]"
        if not isinstance(s, dict):
            ctx.fail("structure terms must be objects", f)
        target = _require(s, "target", int, f, ctx)
        typ = _require(s, "type", str, f, ctx)
        if typ not in TYPES:
            ctx.fail(f"type must be one of {TYPES}, got {typ!r}", f + ".type", f'"{typ}"')
        i = _require(s, "i", int, f, ctx)
        j = _require(s, "j", int, f, ctx)
        for val, key in ((target, "target"), (i, "i"), (j, "j")):
            if not 1 <= val <= n:
                ctx.fail(f"index {key}={val} out of range 1..{n}", f"{f}.{key}")
        if "polynomial" in s:
            poly = parse_poly(s["polynomial"], f + ".polynomial", ctx)
        elif "coeff" in s:
            poly = parse_poly(s["coeff"], f + ".coeff", ctx)
        else:
            ctx.fail("missing field 'coeff' or 'polynomial'", f + ".coeff")
        terms.append((target, typ, i, j, poly))
    if not is_family:
        cf_terms = [(a, b, c, d, poly[0][2]) for a, b, c, d, poly in terms]
        try:
            cf = ComplexCoframe.from_terms(n, cf_terms, name)
        except ValueError as e:
            ctx.fail(str(e), "structure")
        return "coframe", cf, obj
    radius = parse_rational(obj.get("domain_radius", "1"), "domain_radius", ctx)
    if radius <= 0:
        ctx.fail("domain_radius must be positive", "domain_radius", '"domain_radius"')
    frame = None
    if obj.get("frame_change") is not None:
        fc = obj["frame_change"]
        if not isinstance(fc, list) or len(fc) != n:
            ctx.fail(f"frame_change must have {n} rows", "frame_change", '"frame_change"')
        rows = []
        for r, row in enumerate(fc):
            if not isinstance(row, list) or len(row) != 2 * n:
                ctx.fail(f"frame_change rows must have {2 * n} entries", f"frame_change[{r}]")
            rows.append(tuple(parse_poly(p, f"frame_change[{r}][{c}]", ctx)
                              for c, p in enumerate(row)))
        frame = tuple(rows)
    fam = DeformationFamily(name, n, tuple(FamilyTerm(*t) for t in terms), radius, frame,
                            str(obj.get("provenance", "")))
    return "family", fam, obj


def coframe_to_json(cf: ComplexCoframe) -> dict:
    return {
        "name": cf.name,
        "n": cf.n,
        "structure": [{"target": t.target, "type": t.type, "i": t.i, "j": t.j,
                       "coeff": t.coeff.to_json()} for t in cf.structure],
    }


def _poly_json(poly):
    return [{"t_power": a, "tbar_power": b, **c.to_json()} for a, b, c in poly]


def family_to_json(fam) -> dict:
    out = {
        "name": fam.name,
        "n": fam.n,
        "domain_radius": f"{fam.domain_radius.numerator}/{fam.domain_radius.denominator}",
        "structure": [{"target": t.target, "type": t.type, "i": t.i, "j": t.j,
                       "polynomial": _poly_json(t.poly)} for t in fam.terms],
    }
    if fam.frame_change is not None:
        out["frame_change"] = [[_poly_json(p) for p in row] for row in fam.frame_change]
    return out


def parse_form(text: str) -> Form:
    """{"n": int, "terms": [{"holo": [...], "anti": [...], "coeff": {"re","im"}}]}"""
    ctx = _Ctx(text)
    obj = loads_json(text)
    if not isinstance(obj, dict):
        ctx.fail("top level must be an object", "")
    n = _require(obj, "n", int, "", ctx)
    terms = _require(obj, "terms", list, "", ctx)
    out = Form.zero(n)
    for idx, t in enumerate(terms):
        f = f"terms[{idx}]"
        if not isinstance(t, dict):
            ctx.fail("terms must be objects", f)
        holo, anti = t.get("holo", []), t.get("anti", [])
        if not all(isinstance(x, int) and 1 <= x <= n for x in list(holo) + list(anti)):
            ctx.fail("indices must be integers in 1..n", f)
        if "coeff" not in t:
            ctx.fail("missing field 'coeff'", f + ".coeff")
        out = out + Form.monomial(n, tuple(holo), tuple(anti), parse_scalar(t["coeff"], f + ".coeff", ctx))
    return out


def parse_class(text: str) -> list:
    """{"coordinates": [scalar, ...]} in the Aeppli representative basis."""
    ctx = _Ctx(text)
    obj = loads_json(text)
    if not isinstance(obj, dict):
        ctx.fail("top level must be an object", "")
    coords = _require(obj, "coordinates", list, "", ctx)
    return [parse_scalar(c, f"coordinates[{i}]", ctx) for i, c in enumerate(coords)]


__all__ = ["dumps", "parse_entry", "parse_form", "parse_class", "parse_rational",
           "parse_scalar", "coframe_to_json", "family_to_json", "Monomial"]
