"""Command line interface: ``scorebias {audit,curves,verify}``.

Exit codes: 0 success, 1 unreadable or invalid input, 2 configuration
error (bad flags, absent group, empty group/outcome cell), 3 a theorem
check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .calibration import NoValidBinError
from .empirical import UndefinedConditionalError
from .ingest import PRESETS, ColumnSpec, ConfigError, InputError, read_csv
from .inference import PermutationConfig
from .report import audit_report, dumps, parse_measures, round_sig, write_curves
from .theorem_suite import TheoremReport, run_on_frame, run_suite

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_THEOREM = 0, 1, 2, 3


def _add_data_args(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_argument_group("data")
    g.add_argument("--input", required=required, help="CSV file with one row per scored individual")
    g.add_argument("--preset", choices=sorted(PRESETS), help="column and group defaults for a known dataset")
    g.add_argument("--score-col")
    g.add_argument("--group-col")
    g.add_argument("--outcome-col")
    g.add_argument("--favorable", help="raw outcome value meaning favorable (default 0)")
    g.add_argument("--group-a", help="reference group label")
    g.add_argument("--group-b", help="group of interest label")
    g.add_argument("--invert-score", action="store_true", default=None,
                   help="reflect scores inside the range so that high means favorable")
    g.add_argument("--normalize", action="store_true", default=None,
                   help="rescale scores onto [0, 1]")
    g.add_argument("--score-min", type=float)
    g.add_argument("--score-max", type=float)
    g.add_argument("--quiet", action="store_true", help="suppress the load report on stderr")


def _column_spec(args) -> ColumnSpec:
    base = PRESETS[args.preset] if args.preset else None
    fields = {
        "score_col": args.score_col, "group_col": args.group_col,
        "outcome_col": args.outcome_col, "favorable": args.favorable,
        "group_a": args.group_a, "group_b": args.group_b,
        "score_min": args.score_min, "score_max": args.score_max,
        "invert": args.invert_score, "normalize": args.normalize,
    }
    given = {k: v for k, v in fields.items() if v is not None}
    if base is not None:
        return replace(base, **given)
    missing = [k for k in ("score_col", "group_col", "outcome_col", "group_a", "group_b")
               if k not in given]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise ConfigError(f"missing {flags} (or use --preset)")
    given.setdefault("favorable", "0")
    return ColumnSpec(**given)


def _load(args):
    frame, load = read_csv(args.input, _column_spec(args))
    if not args.quiet:
        load.emit(sys.stderr)
    return frame, load


def _write_text(text: str, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_audit(args) -> int:
    if args.bins < 2:
        raise ConfigError("--bins must be at least 2")
    if args.permutations < 0:
        raise ConfigError("--permutations must be nonnegative")
    frame, load = _load(args)
    measures = parse_measures(args.measures, args.bins, args.ties)
    config = None
    if args.permutations > 0:
        config = PermutationConfig(args.permutations, args.seed, args.stratification,
                                   args.pseudocount, args.workers)
    echo = {"bins": args.bins, "ties": args.ties, "preset": args.preset,
            "stratification": args.stratification or "default",
            "measures": [m.label for m in measures]}
    report = audit_report(frame, measures, config, load, echo)
    if args.curves_dir:
        report["curves"] = [str(p) for p in write_curves(frame, args.curves_dir, args.bins)]
    _write_text(dumps(report), args.output)
    return EXIT_OK


def cmd_curves(args) -> int:
    if args.bins < 2:
        raise ConfigError("--bins must be at least 2")
    frame, _ = _load(args)
    for path in write_curves(frame, args.curves_dir, args.bins):
        print(path)
    return EXIT_OK


def _with_tolerance(r: TheoremReport, tol: float) -> TheoremReport:
    return replace(r, tolerance=tol)


def cmd_verify(args) -> int:
    if args.tolerance is not None and not args.tolerance >= 0:
        raise ConfigError("--tolerance must be nonnegative")
    if args.splits < 1:
        raise ConfigError("--splits must be at least 1")
    if args.input:
        frame, _ = _load(args)
        result = run_on_frame(frame)
    else:
        result = run_suite(args.splits, args.seed, min(args.splits, 50))
    reports = result.reports
    if args.tolerance is not None:
        reports = [_with_tolerance(r, args.tolerance) for r in reports]
    for r in reports:
        print(r.line())
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    if args.json:
        payload = {"splits": result.n_splits, "seed": result.seed,
                   "checks": [{"theorem": r.theorem, "relation": r.relation, "left": r.left,
                               "right": r.right, "max_violation": r.max_violation,
                               "tolerance": r.tolerance, "passed": r.passed,
                               "informational": r.informational, "cases": r.cases,
                               "worst_fixture": r.fixture} for r in reports]}
        Path(args.json).write_text(json.dumps(round_sig(payload), indent=2) + "\n",
                                   encoding="utf-8")
    return EXIT_THEOREM if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scorebias",
        description="Threshold-aggregated disparity measures for continuous scores.")
    sub = parser.add_subparsers(dest="command", required=True)

    audit = sub.add_parser("audit", help="compute all disparity measures with p-values (JSON)")
    _add_data_args(audit)
    audit.add_argument("--bins", type=int, default=50, help="calibration bins (default 50)")
    audit.add_argument("--permutations", type=int, default=100,
                       help="permutation replicates per measure; 0 skips testing (default 100)")
    audit.add_argument("--seed", type=int, default=0)
    audit.add_argument("--pseudocount", type=int, default=1)
    audit.add_argument("--stratification", choices=("none", "by_outcome", "by_bin"),
                       help="override the per-measure default")
    audit.add_argument("--workers", type=int, default=1, help="threads for permutation replicates")
    audit.add_argument("--measures", help="comma list such as EO^score,PE,ROC (default all)")
    audit.add_argument("--ties", choices=("transform", "interpolate"), default="transform",
                       help="tie convention for score weighting (default transform)")
    audit.add_argument("--output", help="JSON file (default stdout)")
    audit.add_argument("--curves-dir", help="also export curve CSVs here")
    audit.set_defaults(func=cmd_audit)

    curves = sub.add_parser("curves", help="export threshold, ROC and calibration curves (CSV)")
    _add_data_args(curves)
    curves.add_argument("--bins", type=int, default=50)
    curves.add_argument("--curves-dir", required=True)
    curves.set_defaults(func=cmd_curves)

    verify = sub.add_parser("verify", help="run the theorem checks")
    _add_data_args(verify, required=False)
    verify.add_argument("--splits", type=int, default=500, help="random splits (default 500)")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--tolerance", type=float, help="override every check's tolerance")
    verify.add_argument("--json", help="also write the table as JSON")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, UndefinedConditionalError, NoValidBinError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
