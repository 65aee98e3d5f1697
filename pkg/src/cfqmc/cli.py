"""Command-line entry point: ``cfqmc study --config PATH [overrides]``."""

from __future__ import annotations

import argparse
import sys

from .bench import StudyConfig, convergence_study, emit_report, load_config, parse_config
from .exceptions import CFQMCError


def _methods(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfqmc", description="Convergence studies for MC, QMC, RQMC and RQMC+CF.")
    sub = parser.add_subparsers(dest="command", required=True)
    study = sub.add_parser("study", help="run a convergence study and write CSV reports")
    study.add_argument("--config", help="flat key = value config file (defaults used when omitted)")
    study.add_argument("--fn", dest="function", help="built-in test function name")
    study.add_argument("--dims", type=int)
    study.add_argument("--methods", type=_methods, help="comma-separated subset of mc,qmc,rqmc,rqmc-cf")
    study.add_argument("--budget-min", type=int)
    study.add_argument("--budget-max", type=int)
    study.add_argument("--replicates", type=int)
    study.add_argument("--seed", type=int)
    study.add_argument("--surrogate", choices=("grid", "kernel"))
    study.add_argument("--out-dir")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config") and v is not None}
    try:
        config = load_config(args.config, **overrides) if args.config else parse_config("", **overrides)
        report = convergence_study(config)
        paths = emit_report(report, config)
    except (CFQMCError, OSError) as exc:
        print(f"cfqmc: error: {exc}", file=sys.stderr)
        return 2

    for method in config.methods:
        fit = report.slopes[method]
        note = "" if fit.defined else "  (undefined: all errors zero)"
        print(f"{method:>8}  slope {fit.slope:+.3f} ± {fit.stderr:.3f}{note}")
    for role, path in paths.items():
        print(f"wrote {role}: {path}")
    if report.violations:
        for problem in report.violations:
            print(f"cfqmc: rate ordering violated: {problem}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
