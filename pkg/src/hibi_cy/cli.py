"""Command-line front end (``hibi-cy``).

Exit codes: 0 success, 1 usage or parse error, 2 failed mathematical
gate (or non-smoothable input), 3 operator search exhausted, 4 size guard.
Output is assembled in full and written once. The JSON layout is
described in docs/schema.md.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .builtins import TABLE1, TABLE1_DEGREES, builtin, resolve
from .cycles import DEFAULT_CYCLE_CAP, minimal_convex_cycles, node_loci
from .errors import HibiError, InvalidDegreesError
from .geometry import ray_map
from .invariants import CicySpec, ci_degree_tuples, invariant_report
from .periods import fit_theta_operator, genus0_bps, period_coefficients
from .poset import DEFAULT_IDEAL_CAP, bounded_extension, ideal_lattice, serialize, structure

SCHEMA = "hibi-cy/1"


class UsageError(HibiError):
    pass


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _degrees(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hibi-cy",
        description="Calabi-Yau complete intersections in Hibi toric varieties.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--cap-ideals", type=_positive, default=DEFAULT_IDEAL_CAP)
    common.add_argument("--cap-cycles", type=_positive, default=DEFAULT_CYCLE_CAP)
    with_deg = argparse.ArgumentParser(add_help=False)
    with_deg.add_argument("-d", "--degrees", type=_degrees)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="poset, lattice and cycle data")
    p.add_argument("poset")

    p = sub.add_parser("invariants", parents=[common, with_deg], help="Hodge numbers and invariants")
    p.add_argument("poset", nargs="?")
    p.add_argument("--table1", action="store_true", help="reproduce the six builtin columns")

    p = sub.add_parser("period", parents=[common, with_deg], help="fundamental period coefficients")
    p.add_argument("poset")
    p.add_argument("-M", "--terms", type=int, default=10)

    for name, helptext in (("pf-fit", "fit a Picard-Fuchs operator"),
                           ("bps", "genus-0 BPS numbers")):
        p = sub.add_parser(name, parents=[common, with_deg], help=helptext)
        p.add_argument("poset")
        p.add_argument("-M", "--terms", type=int, default=40)
        p.add_argument("--max-order", type=int, default=4)
        p.add_argument("--max-zdegree", type=int, default=4)
        if name == "bps":
            p.add_argument("-D", type=int, default=6, dest="depth")
    return parser


# helpers


def _load(args):
    poset = resolve(args.poset)
    ideal_lattice(poset, args.cap_ideals)  # early size guard
    return poset


def _spec(args, poset) -> CicySpec:
    if args.degrees:
        return CicySpec(poset, args.degrees)
    options = ci_degree_tuples(poset)
    if len(options) != 1:
        shown = ", ".join(",".join(map(str, t)) for t in options) or "none"
        raise InvalidDegreesError(f"degrees not determined by the poset; pass -d (options: {shown})")
    return CicySpec(poset, options[0])


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _kv(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, tuple)):
        return ",".join(map(str, value))
    return str(value)


# commands


def cmd_analyze(args) -> str:
    poset = _load(args)
    st = structure(poset)
    lat = ideal_lattice(poset, args.cap_ideals)
    p_hat = bounded_extension(poset)
    cycles = minimal_convex_cycles(p_hat, cap=args.cap_cycles)
    four = [c for c in cycles if len(c) == 4]
    loci = node_loci(poset) if four else []
    data = {
        "schema": SCHEMA,
        "command": "analyze",
        "poset": serialize(poset),
        "size": len(poset),
        "pure": st.pure,
        "connected": st.connected,
        "h_P": st.h_P if st.pure else None,
        "edges": len(p_hat.edges),
        "facets": len(p_hat.edges),
        "ideals": lat.size,
        "vertices": lat.size,
        "c_J": lat.chain_count,
        "lambda4": len(four),
        "curve_lattice_rank": len(ray_map(p_hat).kernel()),
        "cycles": [{"size": len(c), "vertices": list(c.vertices)} for c in cycles],
        "node_loci": [
            {"cycle": list(n.cycle.vertices), "locus": serialize(n.locus), "degree": n.degree}
            for n in loci
        ],
    }
    if args.format == "json":
        return _dump(data)
    out = _kv([
        ("poset", data["poset"]),
        ("|P|", data["size"]),
        ("pure", _fmt(st.pure)),
        ("connected", _fmt(st.connected)),
        ("h_P", _fmt(data["h_P"])),
        ("|E| (facets)", data["edges"]),
        ("|J(P)| (vertices)", data["ideals"]),
        ("c_J", data["c_J"]),
        ("4-cycles", data["lambda4"]),
        ("rank H2", data["curve_lattice_rank"]),
    ])
    out += f"\nminimal convex cycles ({len(cycles)})\n"
    for c in cycles:
        out += f"  [{len(c)}] {c}\n"
    if loci:
        out += "\nnode loci\n"
        for n in loci:
            body = serialize(n.locus) if len(n.locus) else "(empty)"
            out += f"  {n.cycle}  P_C = {body}  degree {n.degree}\n"
    return out


_REPORT_ROWS = ("J", "c_J", "h11_Y", "h12_Y", "dp", "rk", "smoothable",
                "h11_X", "h12_X", "chi_X", "deg_X", "c2H")


def cmd_invariants(args) -> str:
    if args.table1:
        reports = [invariant_report(CicySpec(builtin(n), TABLE1_DEGREES[n]), n) for n in TABLE1]
        if args.format == "json":
            return _dump({"schema": SCHEMA, "command": "table1",
                          "reports": [r.to_dict() for r in reports]})
        rows = [("", [r.poset for r in reports]),
                ("degrees", ["(" + ",".join(map(str, r.degrees)) + ")" for r in reports]),
                ("deg", [r.deg_X for r in reports]),
                ("c2.H", [r.c2H for r in reports]),
                ("chi", [r.chi_X for r in reports]),
                ("h11", [r.h11_X for r in reports]),
                ("h12", [r.h12_X for r in reports])]
        width = max(len(str(v)) for _, vals in rows for v in vals) + 2
        return "".join(
            label.ljust(8) + "".join(str(v).rjust(width) for v in vals) + "\n"
            for label, vals in rows
        )
    if not args.poset:
        raise UsageError("invariants needs a poset or --table1")
    poset = _load(args)
    rep = invariant_report(_spec(args, poset), args.poset)
    if args.format == "json":
        text = _dump({"schema": SCHEMA, "command": "invariants", **rep.to_dict()})
        return text if rep.smoothable else (text, 2)
    rows = [("poset", rep.poset), ("degrees", _fmt(rep.degrees))]
    rows += [(k, _fmt(getattr(rep, k))) for k in _REPORT_ROWS]
    rows.append(("witness", rep.smoothing_witness))
    out = _kv(rows)
    for note in rep.notes:
        out += f"note: {note}\n"
    return out if rep.smoothable else (out, 2)


def _series(args, poset):
    if args.terms < 0:
        raise UsageError("-M must be non-negative")
    spec = _spec(args, poset)
    return spec, period_coefficients(spec, args.terms)


def cmd_period(args) -> str:
    spec, series = _series(args, _load(args))
    if args.format == "json":
        return _dump({"schema": SCHEMA, "command": "period", "poset": args.poset,
                      "degrees": list(spec.degrees), **series.to_dict()})
    out = "".join(f"A_{m} = {a}\n" for m, a in enumerate(series.coefficients))
    for note in series.notes:
        out += f"note: {note}\n"
    return out


def _fit(args):
    spec, series = _series(args, _load(args))
    return spec, series, fit_theta_operator(series, args.max_order, args.max_zdegree)


def cmd_pf_fit(args) -> str:
    _, series, op = _fit(args)
    if args.format == "json":
        return _dump({"schema": SCHEMA, "command": "pf-fit", "poset": args.poset,
                      "terms": len(series) - 1, "operator": op.to_dict()})
    return f"order {op.order}, z-degree {op.zdegree}\n{op.pretty()}\n"


def cmd_bps(args) -> str:
    spec, _, op = _fit(args)
    rep = invariant_report(spec, args.poset)
    if rep.deg_X is None:
        raise UsageError("BPS extraction needs Picard rank one and a smoothable input")
    values = genus0_bps(op, rep.deg_X, args.depth)
    integral = all(Fraction(v).denominator == 1 for v in values)
    text = [str(v) for v in values]
    if args.format == "json":
        return _dump({"schema": SCHEMA, "command": "bps", "poset": args.poset,
                      "deg_X": rep.deg_X, "n": text, "integral": integral})
    out = "".join(f"n_{d} = {v}\n" for d, v in enumerate(text, 1))
    if not integral:
        out += "warning: non-integral values\n"
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "invariants": cmd_invariants,
    "period": cmd_period,
    "pf-fit": cmd_pf_fit,
    "bps": cmd_bps,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.command](args)
    except HibiError as exc:
        sys.stderr.write(f"hibi-cy: error: {exc}\n")
        return exc.exit_code
    except (OSError, KeyError) as exc:
        sys.stderr.write(f"hibi-cy: error: {exc}\n")
        return 1
    text, status = result if isinstance(result, tuple) else (result, 0)
    sys.stdout.write(text)
    sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
