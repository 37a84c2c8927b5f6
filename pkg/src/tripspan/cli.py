"""Command-line entry point: ``tripspan <command> [options]``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from tripspan import reports
from tripspan.config import BUDGET_ENV, FORMATS, RunConfig, default_budget
from tripspan.errors import BudgetExceeded, Counterexample, PatternNotFound
from tripspan.groups import GroupSpec
from tripspan.reports import (EXIT_BUDGET, EXIT_COUNTEREXAMPLE, EXIT_NOT_FOUND, EXIT_USAGE,
                              parse_ints, parse_range)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for pattern-not-found here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=int, default=None,
                   help=f"node budget for exhaustive searches (default ${BUDGET_ENV} or 5e7)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", default=None, help="output file (required for svg)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tripspan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("g", help="g(k) table with ratio to sqrt(12k)")
    p.add_argument("--k", required=True, help="k or lo..hi")
    _common(p)

    p = sub.add_parser("h", help="h(m) maxima or a single h(a, b, ell)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", help="m or lo..hi")
    g.add_argument("--triple", help="a,b,ell")
    _common(p)

    p = sub.add_parser("witness", help="small vertex set spanning k triples")
    p.add_argument("--group", required=True, help="zn:N, zqm:Q:M or table:PATH")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--variant", choices=("k3", "sqrt"), default="k3")
    p.add_argument("--system", help="TripleSystem JSON file (default: full system)")
    p.add_argument("--density", default=None, help="keep each pair with this probability")
    p.add_argument("--subgroup", help="comma-separated generators of a cyclic/power subgroup")
    p.add_argument("--recheck", action="store_true", help="re-verify the emitted witness")
    _common(p)

    p = sub.add_parser("isoperimetry", help="edge-boundary minima on the triangular lattice")
    p.add_argument("--k", required=True, help="k or lo..hi")
    p.add_argument("--window", type=int, default=3, help="hexagonal window radius")
    p.add_argument("--mode", choices=("spiral", "brute", "uniqueness"), default="spiral")
    _common(p)

    p = sub.add_parser("verify", help="exhaustive verification suites")
    p.add_argument("--suite", choices=sorted(reports.SUITES), required=True)
    _common(p)

    p = sub.add_parser("lowerbound", help="minimum span in the n^2/64 construction")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--k", type=int, default=3)
    _common(p)

    p = sub.add_parser("pattern", help="grid / subspace search in a random dense set")
    p.add_argument("--group", required=True, help="zn:N or zqm:Q:M")
    p.add_argument("--h", type=int, default=2, help="grid side (cyclic) or dimension (power)")
    p.add_argument("--width", type=int, default=None, help="grid width if not square")
    p.add_argument("--density", default="0.9")
    _common(p)
    return parser


def _density(text):
    if text is None:
        return None
    value = Fraction(text)
    if not 0 < value <= 1:
        raise UsageError("--density must be in (0, 1]")
    return value


def _config(args) -> RunConfig:
    budget = args.budget if args.budget is not None else default_budget()
    return RunConfig(node_budget=budget, worker_count=args.workers,
                     window_radius=getattr(args, "window", 3), seed=args.seed,
                     output_format=args.format)


def _run(args) -> reports.Report:
    cfg = _config(args)
    cmd = args.command
    if cmd == "g":
        return reports.report_g(parse_range(args.k))
    if cmd == "h":
        if args.triple:
            return reports.report_h(triple=parse_ints(args.triple))
        return reports.report_h(parse_range(args.m))
    if cmd == "isoperimetry":
        return reports.report_isoperimetry(parse_range(args.k), args.mode, cfg)
    if cmd == "verify":
        return reports.SUITES[args.suite](cfg)
    if cmd == "lowerbound":
        return reports.report_lowerbound(args.n, args.k, cfg)
    spec = GroupSpec.parse(args.group)
    if cmd == "witness":
        S = reports.load_system(spec, args.system, _density(args.density), args.seed)
        sub = parse_ints(args.subgroup) if args.subgroup else None
        return reports.report_witness(S, args.k, args.variant, cfg, sub, args.recheck)
    if cmd == "pattern":
        return reports.report_pattern(spec, args.h, _density(args.density), args.seed, cfg,
                                      width=args.width)
    raise UsageError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = _run(args)
        report.emit(args.format, args.out)
        if report.exit_code == EXIT_NOT_FOUND:
            print(f"pattern not found: {report.doc.get('reason', '')}", file=sys.stderr)
        elif report.exit_code == EXIT_COUNTEREXAMPLE:
            print("counterexample found", file=sys.stderr)
        return report.exit_code
    except PatternNotFound as exc:
        print(f"pattern not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except Counterexample as exc:
        print(f"counterexample: {exc}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE
    except (UsageError, ValueError, OSError) as exc:
        print(f"tripspan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
