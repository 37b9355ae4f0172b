"""Command-line interface.

Every command prints a machine block (deterministic JSON) and a human block
(aligned tables).  Exit codes: 0 completed, 2 precondition or parse failure,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import traceback
from fractions import Fraction

from . import catalog
from .cohomology import KINDS, CohomologyTable
from .cones import (CONES, DEFAULT_DELTA, cone_equality, cone_membership, feasibility)
from .deformation import (DEFAULT_GRID, REAL_GRID, openness_demo, sweep)
from .errors import BottChernError, InvariantViolation, ParseError, PreconditionError, TowerInfeasible
from .harmonic import harmonic_dims
from .hypotheses import (angella_tomassini, check_Hk, check_Htilde_k, check_star_k,
                         hypothesis_chain, sgg_check, skt_hs_equivalence)
from .induced import kernel_I_equals_image_That, valid_pk
from .io import coframe_to_json, dumps, family_to_json, parse_class, parse_form
from .positivity import grassmann_sample
from .scalars import GaussRat
from .spectral import degeneration_page, frolicher, frolicher_infinity

MACHINE_BEGIN = "BEGIN MACHINE BLOCK"
MACHINE_END = "END MACHINE BLOCK"
EXIT_OK, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 2, 3


# ----------------------------------------------------------------------------
# human tables


def table(headers, rows) -> str:
    cells = [[str(h) for h in headers]] + [[_cell(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _cell(c) -> str:
    if c is None:
        return "-"
    if isinstance(c, bool):
        return "yes" if c else "no"
    if isinstance(c, float):
        return f"{c:.6g}"
    return str(c)


def _grid_table(title, n, dims) -> str:
    rows = [[f"p={p}"] + [dims[(p, q)] for q in range(n + 1)] for p in range(n + 1)]
    return f"{title}\n" + table([""] + [f"q={q}" for q in range(n + 1)], rows)


# ----------------------------------------------------------------------------
# input helpers


def parse_t(token: str) -> GaussRat:
    """'1/4', '-1/8i', '1/4+1/8i' or 'i' as an exact Gaussian rational."""
    s = token.strip().replace(" ", "")
    m = re.fullmatch(r"\(?([+-]?\d+(?:/\d+)?)?(?:([+-]?)(\d+(?:/\d+)?)?i)?\)?", s)
    if not s or m is None or (m.group(1) is None and m.group(3) is None and "i" not in s):
        raise ParseError(f"invalid grid point {token!r}", field="grid")
    re_part, sign, im_mag = m.group(1), m.group(2), m.group(3)
    if "i" not in s:
        return GaussRat(Fraction(re_part))
    if re_part is not None and not sign and im_mag is None:
        # "3i" matches with the real group holding 3
        return GaussRat(0, Fraction(re_part))
    if re_part is not None and not sign:
        raise ParseError(f"invalid grid point {token!r}", field="grid")
    im = Fraction(im_mag) if im_mag else Fraction(1)
    if sign == "-":
        im = -im
    return GaussRat(Fraction(re_part) if re_part else Fraction(0), im)


def parse_grid(spec: str) -> tuple:
    if spec == "default":
        return DEFAULT_GRID
    if spec == "real":
        return REAL_GRID
    return tuple(parse_t(tok) for tok in spec.split(","))


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path!r}: {e.strerror}", field="file") from None


# ----------------------------------------------------------------------------
# commands; each returns (result dict, human text)


def _options(args) -> dict:
    return {"seed": args.seed, "sample_size": args.sample_size, "margin": args.margin,
            "tol": args.tol}


def _entry_json(entry) -> dict:
    body = coframe_to_json(entry.coframe) if entry.coframe else family_to_json(entry.family)
    return {"kind": entry.kind, "provenance": entry.provenance, **body}


def cmd_ops(args, entry):
    ops = entry.ops
    ops.verify_identities()
    dims = {(p, q): ops.dim(p, q) for p, q in ops.bidegrees()}
    res = {"n": ops.n, "identities": {"del^2": True, "dbar^2": True, "anticommute": True},
           "dims": dims, "total_dim": sum(dims.values())}
    human = _grid_table(f"{entry.name}: operator identities hold; bidegree dimensions", ops.n, dims)
    return res, human


def cmd_cohomology(args, entry):
    ops = entry.ops
    tab = CohomologyTable(ops)
    n = ops.n
    if args.label is not None:
        if args.p is None or (args.label != "deRham" and args.q is None):
            raise ParseError("--label needs --p (and --q unless deRham)", field="--p")
        space = tab.get(args.label, args.p, None if args.label == "deRham" else args.q)
        reps = [f.to_json() for f in space.representative_forms()]
        res = {"label": space.label, "dim": space.dimension, "representatives": reps}
        return res, table(["space", "dim"], [[space.label, space.dimension]])
    res = {"betti": tab.betti()}
    parts = [table([f"b{k}" for k in range(2 * n + 1)], [res["betti"]])]
    for kind in KINDS[1:]:
        dims = tab.hodge_table(kind)
        res[kind] = dims
        parts.append(_grid_table(kind, n, dims))
    return res, "\n\n".join(parts)


def cmd_frolicher(args, entry):
    ops = entry.ops
    page = frolicher(ops, args.page)
    inf = frolicher_infinity(ops)
    res = {"page": args.page, "dims": page.dims, "infinity": inf.dims,
           "degeneration_page": degeneration_page(ops)}
    human = _grid_table(f"E_{args.page}", ops.n, page.dims)
    human += f"\n\ndegenerates at E_{res['degeneration_page']}"
    return res, human


def _record_rows(records):
    return [[r["name"], ",".join(str(x) for x in r["params"]), r["verdict"], r["detail"]]
            for r in records]


def cmd_hypotheses(args, entry):
    ops = entry.ops
    if args.p is not None or args.k is not None:
        if args.p is None or args.k is None:
            raise ParseError("--p and --k go together", field="--k")
        recs = [check_Htilde_k(ops, args.p, args.k).to_json(), check_Hk(ops, args.p, args.k).to_json()]
        res = {"records": recs}
    elif args.star is not None:
        res = {"records": [check_star_k(ops, args.star).to_json()]}
    else:
        recs = hypothesis_chain(ops).to_json()
        tab = CohomologyTable(ops)
        at = [angella_tomassini(ops, k, tab) for k in range(2 * ops.n + 1)]
        kernel = {f"{p},{k}": kernel_I_equals_image_That(ops, p, k) for p, k in valid_pk(ops.n)}
        res = {"records": recs,
               "angella_tomassini": [{"k": a.k, "lhs": a.lhs, "rhs": a.rhs, "slack": a.slack}
                                     for a in at],
               "ker_I_equals_im_That": kernel}
        if ops.n == 3:
            recs.append(sgg_check(ops, seed=args.seed, size=args.sample_size).to_json())
    human = table(["hypothesis", "params", "holds", "detail"], _record_rows(res["records"]))
    if "angella_tomassini" in res:
        human += "\n\n" + table(["k", "2b_k", "Aeppli sum", "slack"],
                                [[a["k"], a["lhs"], a["rhs"], a["slack"]]
                                 for a in res["angella_tomassini"]])
    return res, human


def _sample(args, n, p):
    return grassmann_sample(n, p, args.sample_size, args.seed)


def cmd_cones(args, entry):
    ops = entry.ops
    p = args.p
    sample = _sample(args, ops.n, p)
    delta = args.margin
    if args.membership:
        coords = parse_class(_read(args.membership))
        cones = [args.cone] if args.cone else ["A", "C"]
        reps = [cone_membership(ops, c, p, coords, sample, delta, args.seed, args.sample_size)
                for c in cones]
        res = {"membership": [r.to_json() for r in reps]}
        human = table(["cone", "member", "margin", "note"],
                      [[f"{r.cone}_{p}", r.member, r.margin, r.note] for r in reps])
        return res, human
    cones = [args.cone] if args.cone else ["A", "C"]
    reps = [feasibility(ops, c, p, sample, delta, args.seed, args.sample_size) for c in cones]
    res = {"feasibility": [r.to_json() for r in reps]}
    rows = [[f"{r.cone}_{p}", r.status, r.margin, r.exact_empty, r.note] for r in reps]
    human = table(["cone", "status", "margin", "exact", "note"], rows)
    if not args.cone:
        eq = cone_equality(ops, p, sample, delta, args.seed, args.sample_size)
        res["equality"] = eq.to_json()
        human += f"\n\nA_{p} vs C_{p}: {eq.verdict}" + (f" ({eq.note})" if eq.note else "")
    return res, human


def cmd_tower(args, entry):
    ops = entry.ops
    omega = parse_form(_read(args.form))
    if omega.n != ops.n:
        raise ParseError(f"form has n = {omega.n}, entry has n = {ops.n}", field="n")
    if omega.bidegree != (args.p, args.p):
        raise ParseError(f"form is not of bidegree ({args.p},{args.p})", field="terms")
    try:
        rep = skt_hs_equivalence(ops, omega)
        res = rep.to_json()
        human = f"tower solved at p = {args.p}; assembled form d-closed: {_cell(rep.closed)}"
    except TowerInfeasible as e:
        res = {"solvable": False, "certificate": e.certificate, "detail": str(e)}
        human = f"tower infeasible: {e}"
    return res, human


def cmd_sweep(args, entry):
    fam = catalog.load_family(args.family)
    rep = sweep(fam, parse_grid(args.grid))
    res = rep.to_json()
    keys = [k for k in rep.points[0].dims] if rep.points else []
    varying = [k for k in keys if not rep.constant.get(k, True)]
    rows = [[str(pt.t)] + [pt.dims[k] for k in varying] for pt in rep.points]
    human = table(["t"] + varying, rows) if varying else "all dimensions constant on the grid"
    human += f"\n\n{sum(rep.constant.values())}/{len(rep.constant)} quantities constant near 0"
    return res, human


def cmd_openness(args, entry):
    fam = catalog.load_family(args.family)
    omega = parse_form(_read(args.form))
    rep = openness_demo(fam, omega, parse_grid(args.grid), None, args.margin,
                        seed=args.seed, size=args.sample_size)
    res = rep.to_json()
    human = table(["t", "margin"], [[str(t), m] for t, m in rep.margins])
    human += f"\n\ncertified radius >= {rep.certified_radius}"
    if not rep.holomorphic:
        human += " (smooth-only family)"
    return res, human


def cmd_report(args, entry):
    ops = entry.ops
    ops.verify_identities()
    tab = CohomologyTable(ops)
    n = ops.n
    res = {"betti": tab.betti()}
    parts = [table([f"b{k}" for k in range(2 * n + 1)], [res["betti"]])]
    harmonic_ok = True
    for kind in ("BC", "A"):
        dims = tab.hodge_table(kind)
        res[kind] = dims
        parts.append(_grid_table(kind, n, dims))
        for (p, q), d in dims.items():
            harmonic_ok &= harmonic_dims(ops, kind, p, q, args.tol) == d
    if not harmonic_ok:
        raise InvariantViolation("harmonic dimensions disagree with exact dimensions")
    res["harmonic_agrees"] = True
    res["degeneration_page"] = degeneration_page(ops)
    hyp, _ = cmd_hypotheses(argparse.Namespace(**{**vars(args), "p": None, "k": None, "star": None}),
                            entry)
    res["hypotheses"] = hyp
    res["cones"] = {}
    rows = []
    for p in range(1, n):
        eq = cone_equality(ops, p, _sample(args, n, p), args.margin, args.seed, args.sample_size)
        res["cones"][str(p)] = eq.to_json()
        rows.append([p, eq.a_report.status if eq.a_report else None, eq.verdict])
    parts.append(f"degenerates at E_{res['degeneration_page']}")
    parts.append(table(["hypothesis", "params", "holds", "detail"], _record_rows(hyp["records"])))
    if rows:
        parts.append(table(["p", "A_p", "A_p vs C_p"], rows))
    return res, "\n\n".join(parts)


COMMANDS = {
    "ops": cmd_ops, "cohomology": cmd_cohomology, "frolicher": cmd_frolicher,
    "hypotheses": cmd_hypotheses, "cones": cmd_cones, "tower": cmd_tower,
    "sweep": cmd_sweep, "openness": cmd_openness, "report": cmd_report,
}


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bottchern",
                                 description="Bott-Chern and Aeppli cohomology of nilmanifold models")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sample-size", type=int, default=2000)
    ap.add_argument("--margin", type=float, default=DEFAULT_DELTA,
                    help="positivity margin delta for cone searches")
    ap.add_argument("--tol", type=float, default=1e-8, help="relative singular-value threshold")
    ap.add_argument("--format", choices=("json", "table", "both"), default="both")
    ap.add_argument("--output", help="also write the machine block to this file")
    sub = ap.add_subparsers(dest="command", required=True)

    def entry_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("entry", help=f"builtin name ({', '.join(catalog.builtin_names())}) or JSON file")
        return sp

    sp = sub.add_parser("ops", help="build and check the operators")
    sp.add_argument("action", choices=("check",))
    sp.add_argument("entry")

    sp = entry_cmd("cohomology", "cohomology dimensions")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true")
    g.add_argument("--label", choices=KINDS)
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)

    sp = entry_cmd("frolicher", "Frolicher spectral sequence page")
    sp.add_argument("--page", type=int, default=1)

    sp = entry_cmd("hypotheses", "hypothesis verdicts")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true")
    g.add_argument("--star", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--k", type=int)

    sp = entry_cmd("cones", "positive cone feasibility and equality")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--cone", choices=CONES)
    sp.add_argument("--membership", metavar="CLASSFILE")

    sp = entry_cmd("tower", "solve the closing tower for a (p,p)-form")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--form", required=True, metavar="FORMFILE")

    sp = sub.add_parser("sweep", help="cohomology along a deformation family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--grid", default="default", help="default, real, or comma list like 0,1/4,-1/8i")

    sp = sub.add_parser("openness", help="positivity of projected forms near t = 0")
    sp.add_argument("--family", required=True)
    sp.add_argument("--form", required=True, metavar="FORMFILE")
    sp.add_argument("--grid", default="default")

    sp = entry_cmd("report", "full report for one entry")
    sp.add_argument("--format", dest="report_format", choices=("json", "table", "both"))
    return ap


def run(argv) -> tuple[dict, str]:
    """Parse ``argv`` and run the command; returns (machine block, human block)."""
    args = build_parser().parse_args(argv)
    if args.sample_size < 1:
        raise ParseError("--sample-size must be positive", field="--sample-size")
    name = getattr(args, "entry", None)
    entry = catalog.load(name if name is not None else args.family)
    result, human = COMMANDS[args.command](args, entry)
    machine = {
        "command": args.command,
        "entry": _entry_json(entry),
        "options": _options(args),
        "result": result,
    }
    return machine, human


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_PRECONDITION if e.code else EXIT_OK
    fmt = getattr(args, "report_format", None) or args.format
    try:
        machine, human = run(argv)
    except PreconditionError as e:
        _diagnose(e, "precondition")
        return EXIT_PRECONDITION
    except (InvariantViolation, BottChernError) as e:
        _diagnose(e, "internal")
        return EXIT_INTERNAL
    except Exception as e:  # noqa: BLE001  any crash is an internal failure
        traceback.print_exc()
        _diagnose(e, "internal")
        return EXIT_INTERNAL
    text = dumps(machine)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if fmt in ("json", "both"):
        if fmt == "both":
            print(MACHINE_BEGIN)
        print(text)
        if fmt == "both":
            print(MACHINE_END)
    if fmt == "both":
        print()
    if fmt in ("table", "both"):
        print(human)
    return EXIT_OK


def _diagnose(e: BaseException, kind: str) -> None:
    print(json.dumps({"error": type(e).__name__, "kind": kind, "message": str(e)}, sort_keys=True),
          file=sys.stderr)


def extract_machine_block(stdout: str) -> str:
    """The JSON machine block from ``--format both`` output."""
    start = stdout.index(MACHINE_BEGIN) + len(MACHINE_BEGIN)
    return stdout[start:stdout.index(MACHINE_END)].strip()


if __name__ == "__main__":
    sys.exit(main())
