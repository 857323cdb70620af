"""Command-line interface: ``dommove <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 a solver cap was hit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from dommove import compare as cmp
from dommove.errors import DomError
from dommove.geometry import PointSet, pareto_filter
from dommove.indicators import auto_reference_point, auto_reference_set, hypervolume, igd
from dommove.io import format_pointset, parse_pointset
from dommove.mip import build_model, export_lp
from dommove.solver import verify_certificate

log = logging.getLogger("dommove")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _add_solver_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--no-preprocess", action="store_true", help="skip Pareto filtering and reduction")
    sp.add_argument("--node-cap", type=int, default=10**7)
    sp.add_argument("--time-cap", type=float, default=300.0, help="seconds per solve")
    sp.add_argument("--no-shift", action="store_true",
                    help="do not translate negative inputs to the non-negative orthant")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dommove", description="Dominance move between solution sets.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    f = sub.add_parser("filter", help="Pareto-filter a CSV point set")
    f.add_argument("file")
    f.add_argument("-o", "--output")

    d = sub.add_parser("dom", help="DoM(P, Q) with a certificate, as JSON")
    d.add_argument("p")
    d.add_argument("q")
    _add_solver_flags(d)

    c = sub.add_parser("compare", help="pairwise DoM matrix and row-sum ranking")
    c.add_argument("files", nargs="+")
    _add_solver_flags(c)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--format", choices=("text", "csv", "json"), default="text")
    c.add_argument("--cross-check", action="store_true", help="also run the biobjective algorithm when M = 2")
    c.add_argument("--no-certificates", action="store_true", help="omit certificates from JSON")

    s = sub.add_parser("stats", help="per-pair solve statistics as CSV")
    s.add_argument("files", nargs="+")
    _add_solver_flags(s)
    s.add_argument("--jobs", type=int, default=1)

    for name, helptext in (("hv", "hypervolume of each set"), ("igd", "IGD of each set")):
        x = sub.add_parser(name, help=helptext)
        x.add_argument("files", nargs="+")
        g = x.add_mutually_exclusive_group(required=True)
        if name == "hv":
            g.add_argument("--ref", help="reference point, comma separated")
        else:
            g.add_argument("--ref", help="reference set CSV")
        g.add_argument("--auto-ref", action="store_true", help="derive the reference from all given sets")

    e = sub.add_parser("export-mip", help="write the MIP model as LP text")
    e.add_argument("p")
    e.add_argument("q")
    e.add_argument("-o", "--output", required=True)
    e.add_argument("--shift", action="store_true", help="translate negative coordinates to zero first")
    e.add_argument("--no-preprocess", action="store_true")
    e.add_argument("--verbatim-big-m", action="store_true",
                   help="use the uncorrected big-M coefficient (known to be infeasible in general)")
    return parser


def _read_sets(paths: Sequence[str]) -> list[PointSet]:
    return [parse_pointset(p) for p in paths]


def _run_config(args, fmt: str = "text") -> cmp.RunConfig:
    return cmp.RunConfig(
        preprocess=not args.no_preprocess,
        shift=not args.no_shift,
        node_cap=args.node_cap,
        time_cap=args.time_cap,
        jobs=getattr(args, "jobs", 1),
        output_format=fmt,
        cross_check=getattr(args, "cross_check", False),
    )


def _cmd_filter(args, out) -> int:
    s = parse_pointset(args.file)
    text = format_pointset(pareto_filter(s))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _cmd_dom(args, out) -> int:
    p, q = parse_pointset(args.p), parse_pointset(args.q)
    cfg = _run_config(args)
    shift = cmp.shift_vector([p, q]) if cfg.shift else None
    if shift is not None and np.any(shift > 0):
        log.info("negative coordinates: translating both sets by %s", shift.tolist())
    cert, stats = cmp.solve_pair(p, q, cfg.solve_options(), shift)
    doc = {
        "p": p.label,
        "q": q.label,
        "value": cert.value,
        "optimal": stats.optimal,
        "lower_bound": stats.lower_bound,
        "verified": verify_certificate(p, q, cert),
        "certificate": cert.to_dict(),
        "stats": stats.to_dict(),
    }
    out.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if stats.optimal else EXIT_CAP


def _cmd_compare(args, out) -> int:
    sets = _read_sets(args.files)
    if len(sets) < 2:
        raise UsageError("compare needs at least two input files")
    cfg = _run_config(args, args.format)
    m = cmp.compare_matrix(sets, cfg)
    if cfg.output_format == "json":
        out.write(cmp.to_json(m, include_certificates=not args.no_certificates))
    elif cfg.output_format == "csv":
        out.write(cmp.to_csv(m))
    else:
        out.write(cmp.to_text(m))
    if m.mismatches:
        return EXIT_DATA
    return EXIT_OK if m.complete else EXIT_CAP


def _cmd_stats(args, out) -> int:
    sets = _read_sets(args.files)
    if len(sets) < 2:
        raise UsageError("stats needs at least two input files")
    m = cmp.compare_matrix(sets, _run_config(args))
    out.write(cmp.stats_csv(m))
    return EXIT_OK if m.complete else EXIT_CAP


def _cmd_hv(args, out) -> int:
    sets = _read_sets(args.files)
    if args.auto_ref:
        ref = auto_reference_point(sets)
    else:
        try:
            ref = np.array([float(x) for x in args.ref.split(",")])
        except ValueError:
            raise UsageError(f"bad --ref {args.ref!r}") from None
    log.info("hypervolume reference point: %s", ref.tolist())
    for s in sets:
        out.write(f"{s.label},{hypervolume(s, ref)!r}\n")
    return EXIT_OK


def _cmd_igd(args, out) -> int:
    sets = _read_sets(args.files)
    ref = auto_reference_set(sets) if args.auto_ref else parse_pointset(args.ref)
    for s in sets:
        out.write(f"{s.label},{igd(ref, s)!r}\n")
    return EXIT_OK


def _cmd_export(args, out) -> int:
    p, q = parse_pointset(args.p), parse_pointset(args.q)
    if args.shift:
        shift = cmp.shift_vector([p, q])
        if np.any(shift > 0):
            log.info("translating both sets by %s", shift.tolist())
            p, q = p.translated(shift), q.translated(shift)
    model = build_model(p, q, preprocess=not args.no_preprocess,
                        big_m_form="verbatim" if args.verbatim_big_m else "corrected")
    Path(args.output).write_text(export_lp(model), encoding="utf-8", newline="\n")
    return EXIT_OK


_COMMANDS = {
    "filter": _cmd_filter,
    "dom": _cmd_dom,
    "compare": _cmd_compare,
    "stats": _cmd_stats,
    "hv": _cmd_hv,
    "igd": _cmd_igd,
    "export-mip": _cmd_export,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dommove: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"dommove: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomError, OSError) as exc:
        print(f"dommove: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
