"""Command line entry point.

Exit status: 0 when the framework is ultrarigid (or the theorem's
conditions hold), 1 when it is not, 2 on any error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .combinatorics import check_thm_fixed, check_thm_flexible
from .core_model import GraphError
from .decider import DEFAULT_MAX_BOUND, BoundTooLarge, Model, decide, rum_rational_spectrum
from .framework_io import load_framework
from .numtheory import bound_N0

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_decide(args) -> int:
    fw = load_framework(args.framework)
    model = Model(args.model or fw.model or "flexible")
    start = time.perf_counter()
    verdict = decide(fw, model, max_bound=args.max_bound, threads=args.threads, seed=args.seed,
                     engine=args.engine, order_limit=args.order_limit, regauge=args.regauge)
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    _emit(verdict.as_dict())
    return EXIT_YES if verdict.is_ultrarigid else EXIT_NO


def _cmd_rum(args) -> int:
    fw = load_framework(args.framework)
    rows = rum_rational_spectrum(fw, args.max_order, seed=args.seed)
    header = "\t".join([f"k{i + 1}/N" for i in range(fw.dim)] + ["nullity"])
    lines = [header]
    for point, nullity in rows:
        lines.append("\t".join([str(f) for f in point.as_fractions()] + [str(nullity)]))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_YES


def _cmd_comb(args) -> int:
    fw = load_framework(args.framework)
    if args.theorem == "fixed":
        report = check_thm_fixed(fw.graph, seed=args.seed)
    else:
        report = check_thm_flexible(fw.graph, seed=args.seed)
    _emit(report.as_dict())
    return EXIT_YES if report.holds else EXIT_NO


def _cmd_bound(args) -> int:
    _emit(bound_N0(args.dim, args.weight, args.field_degree).as_dict())
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultrarigid",
                                     description="Exact ultrarigidity tests for periodic frameworks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide infinitesimal ultrarigidity of a framework file")
    p.add_argument("framework")
    p.add_argument("--model", choices=[m.value for m in Model])
    p.add_argument("--max-bound", type=int, default=DEFAULT_MAX_BOUND,
                   help="refuse to run when the torsion bound exceeds this")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $ULTRARIGID_THREADS or 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=["auto", "pointwise", "batched"], default="auto")
    p.add_argument("--order-limit", type=int, default=None,
                   help="stop the torsion scan at this order (the verdict is then partial)")
    p.add_argument("--regauge", action="store_true",
                   help="recolor to reduce the total color weight before bounding")
    p.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("rum", help="list torsion points where the Laurent matrix drops rank")
    p.add_argument("framework")
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_rum)

    p = sub.add_parser("comb", help="check the combinatorial conditions for generic ultrarigidity")
    p.add_argument("framework")
    p.add_argument("--theorem", choices=["flexible", "fixed"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_comb)

    p = sub.add_parser("bound", help="print the torsion-order bound")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--field-degree", type=int, default=1)
    p.set_defaults(func=_cmd_bound)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_YES
    try:
        return args.func(args)
    except BoundTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
