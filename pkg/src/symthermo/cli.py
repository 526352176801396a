"""Command line: ``symthermo check|flow|report|systems``.

Exit codes: 0 when every check passes, 1 when a check fails or a flow
leaves its domain, 2 for unreadable or invalid configs.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__, blackhole, eos
from .config import FIXTURES, ConfigError, load_config
from .contact import HomogeneityError
from .suite import Overrides, run_check_suite, run_flow

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _overrides(args) -> Overrides:
    return Overrides(args.tolerance, args.seed, args.grid)


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    report = run_check_suite(cfg, _overrides(args))
    if args.json:
        sys.stdout.write(_dump(report.to_dict()))
    else:
        for c in report.checks:
            print(c.line())
        failed = [c.check for c in report.checks if not c.passed]
        if failed:
            print(f"{cfg.name}: FAIL ({len(failed)} of {len(report.checks)} checks: "
                  f"{', '.join(failed)})")
        else:
            print(f"{cfg.name}: PASS ({len(report.checks)} checks)")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_report(args) -> int:
    cfg = load_config(args.config)
    report = run_check_suite(cfg, _overrides(args))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dump(report.to_dict(timings=args.timings)))
    print(f"{cfg.name}: {'PASS' if report.passed else 'FAIL'} -> {args.out}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_flow(args) -> int:
    cfg = load_config(args.config)
    try:
        result = run_flow(cfg, args.generator, args.out)
    except HomogeneityError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL
    print(result.summary().lstrip("# "))
    if result.error is not None:
        print(f"error: flow stopped after step {result.error.step}: {result.error.message}",
              file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_systems(args) -> int:
    print("constraint systems: " + ", ".join(eos.BUILTIN_SYSTEMS))
    print("black-hole models: " + ", ".join(blackhole.BUILTIN_MODELS))
    print("shipped configs: " + ", ".join(f"{name}.json" for name in FIXTURES))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symthermo",
        description="Verify symplectic and contact structure of thermodynamic systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="config file, or the name of a shipped config")
    common.add_argument("--tolerance", type=float, help="use this tolerance for every check")
    common.add_argument("--seed", type=int, help="seed for random sample states")
    common.add_argument("--grid", type=int, help="grid points per axis")

    p = sub.add_parser("check", parents=[common], help="run the verification suite")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", parents=[common], help="write the JSON report to a file")
    p.add_argument("--out", required=True)
    p.add_argument("--timings", action="store_true", help="include wall time per check")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("flow", parents=[common], help="integrate a flow and write CSV")
    p.add_argument("--generator", choices=("restricted", "X_G", "X_H"), default="restricted")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("systems", help="list built-in systems and shipped configs")
    p.set_defaults(func=cmd_systems)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "grid", None) is not None and args.grid < 2:
        print("error: --grid needs at least 2 points", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "tolerance", None) is not None and not args.tolerance > 0:
        print("error: --tolerance must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
