"""Command line entry point.

    price instance.json [--format json|csv|markdown] [--epsilon E]
                        [--sweep d1,d2,...] [--rep lo|mid|hi]

The report (or demand sweep) goes to stdout, a diagnostics summary to
stderr.  Exit codes: 0 all diagnostics pass, 1 a diagnostic failed,
2 schema or validation problem, 3 infeasible instance.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import (
    InfeasibleError,
    PricingError,
    SchemaError,
    UnknownFormatError,
    ValidationError,
)
from .market_model import parse_instance
from .report import load_sweep, render_report, render_sweep, run_pipeline

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _parse_sweep(arg: str):
    try:
        values = [float(tok) for tok in arg.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad sweep grid {arg!r}: {exc}")
    if not values:
        raise argparse.ArgumentTypeError("sweep grid is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="price",
        description="Exact dispatch, hull prices and reduced-uplift prices "
        "for a one-period single-node market instance.",
    )
    parser.add_argument("instance", help="path to an instance JSON file")
    parser.add_argument(
        "--format",
        choices=("json", "csv", "markdown"),
        default="json",
        help="output format (default json)",
    )
    parser.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="margin for the capped dual's diagnostics (default 1e-6 * demand)",
    )
    parser.add_argument(
        "--sweep",
        type=_parse_sweep,
        default=None,
        metavar="d1,d2,...",
        help="reprice over this demand grid instead of a single report",
    )
    parser.add_argument(
        "--rep",
        choices=("lo", "mid", "hi"),
        default="lo",
        help="which price in each set settles the market (default lo)",
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        with open(args.instance, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.instance}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        instance = parse_instance(text)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        # a well-formed instance whose only problem is capacity < demand
        if exc.violations and all(v.startswith("infeasible") for v in exc.violations):
            return EXIT_INFEASIBLE
        return EXIT_INVALID
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        if args.sweep is not None:
            rows = load_sweep(instance, args.sweep)
            sys.stdout.write(render_sweep(rows, args.format))
            bad = [r for r in rows if r.error is not None]
            for r in bad:
                print(f"demand {r.demand}: {r.error}", file=sys.stderr)
            print(
                f"sweep: {len(rows) - len(bad)}/{len(rows)} demand levels priced",
                file=sys.stderr,
            )
            return EXIT_OK if not bad else EXIT_CHECK_FAILED
        report = run_pipeline(
            instance,
            epsilon_override=args.epsilon,
            price_representative=args.rep,
        )
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except UnknownFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PricingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED

    sys.stdout.write(render_report(report, args.format))

    checks = report.checks
    for name in (
        "single_large_unit_committed",
        "reduction_invariant",
        "price_ordering",
        "uplift_dominance",
        "limit_consistent_with_eps",
    ):
        state = "ok" if getattr(checks, name) else "FAILED"
        print(f"check {name}: {state}", file=sys.stderr)
    return EXIT_OK if checks.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
