"""Command line front end.

  gr1kit check SPEC [--dot FILE]
  gr1kit refine SPEC [--alpha N] [--beta N] [--all] [--p1 ...] [--json F] [--dot F]
  gr1kit serve [--port N] [--host H] [--persist DIR] [--ui-dir DIR]

check prints REALIZABLE or UNREALIZABLE and exits 0 or 1; spec errors
exit 2.  refine prints found refinements as spec section lines, one
refinement per block, and exits 0 when at least one was found.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dot as dot_mod
from .errors import SpecError
from .refine import refine_search
from .solver import solve_spec
from .specml import parse_spec, section_of, format_part


def _read_spec(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return parse_spec(text)


def _subset(raw: str | None):
    if raw is None:
        return None
    names = [n.strip() for n in raw.split(",") if n.strip()]
    return names


def cmd_check(args) -> int:
    spec = _read_spec(args.spec)
    result = solve_spec(spec)
    if result.realizable:
        note = " (no legal environment start)" if result.vacuous else ""
        print(f"REALIZABLE{note}")
        code = 0
    else:
        print("UNREALIZABLE")
        code = 1
    if args.dot:
        if result.counter_strategy is None:
            print("no counter-strategy to draw", file=sys.stderr)
        else:
            text = dot_mod.dot_counterstrategy(result.counter_strategy)
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(text)
    return code


def cmd_refine(args) -> int:
    spec = _read_spec(args.spec)
    result = refine_search(
        spec,
        alpha=args.alpha,
        beta=args.beta,
        p_liveness=_subset(args.p1),
        p_safety=_subset(args.p2),
        p_trigger=_subset(args.p3),
        p_target=_subset(args.p4),
        mode="all" if args.all else "first",
    )
    report = result.report
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot_mod.dot_search_tree(report))
    if not result.refinements:
        print("no refinement found")
        print(
            f"processed {report.counterstrategies_processed} counter-strategies, "
            f"{report.candidates_generated} candidates, "
            f"{report.inconsistent_nodes} inconsistent"
        )
        return 1
    for idx, parts in enumerate(result.refinements, start=1):
        print(f"# refinement {idx}")
        if not parts:
            print("# (spec is already realizable)")
        for part in parts:
            print(f"{section_of(part)}: {format_part(part)}")
    print(
        f"# processed {report.counterstrategies_processed} counter-strategies, "
        f"{report.candidates_generated} candidates, "
        f"{report.inconsistent_nodes} inconsistent"
    )
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    serve(
        host=args.host,
        port=args.port,
        persist_dir=args.persist,
        ui_dir=args.ui_dir,
    )
    return 0


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        msg = "must be at least 1"
        raise argparse.ArgumentTypeError(msg)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gr1kit",
        description="GR(1) realizability checking and assumption refinement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide realizability of a spec")
    p_check.add_argument("spec", help="spec file path, or - for stdin")
    p_check.add_argument(
        "--dot", metavar="FILE", help="write the counter-strategy graph"
    )
    p_check.set_defaults(func=cmd_check)

    p_refine = sub.add_parser("refine", help="search for repairing assumptions")
    p_refine.add_argument("spec", help="spec file path, or - for stdin")
    p_refine.add_argument(
        "--alpha", type=_positive_int, default=2,
        help="search depth in counter-strategies (default 2)",
    )
    p_refine.add_argument(
        "--beta", type=_positive_int, default=None,
        help="pattern size bound (default: graph max out-degree)",
    )
    p_refine.add_argument(
        "--all", action="store_true",
        help="report every refinement within depth alpha, not just the first",
    )
    p_refine.add_argument("--p1", metavar="VARS", help="liveness projection, comma separated")
    p_refine.add_argument("--p2", metavar="VARS", help="invariant projection")
    p_refine.add_argument("--p3", metavar="VARS", help="transition trigger projection")
    p_refine.add_argument("--p4", metavar="VARS", help="transition target projection")
    p_refine.add_argument("--json", metavar="FILE", help="write the search report")
    p_refine.add_argument("--dot", metavar="FILE", help="write the search tree graph")
    p_refine.set_defaults(func=cmd_refine)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8719)
    p_serve.add_argument("--persist", metavar="DIR", help="session storage directory")
    p_serve.add_argument("--ui-dir", metavar="DIR", help="static files to serve at /")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
