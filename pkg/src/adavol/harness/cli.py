"""Command-line entry point: ``adavol run | verify | show-bound``.

Exit codes are 0 on success, 1 for divergence or a failed check, and 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from ..diagnostics import TheoryConstants, step_size_bound, step_size_bound_branches
from ..errors import ConfigError
from .config import load_config
from .runner import run_experiment
from .verify import SUITES, run_suites, sanitize

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adavol", description="Adaptive-volatility Langevin experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_p = sub.add_parser("run", help="run an experiment config")
    run_p.add_argument("config", help="path to an INI config, or a shipped name (figure1, figure2)")
    run_p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config value; repeatable")
    run_p.add_argument("--output-dir", help="write artifacts here instead of the configured directory")
    run_p.add_argument("--svg", action="store_true", help="also write the SVG plot")

    ver_p = sub.add_parser("verify", help="run diagnostic suites")
    ver_p.add_argument("suite", choices=["all", *SUITES], help="suite to run")
    ver_p.add_argument("--report", help="write the JSON report to this file (default: stdout)")

    bound_p = sub.add_parser("show-bound", help="print the step-size bound and its branches")
    bound_p.add_argument("--alpha", type=float, required=True)
    bound_p.add_argument("--L", type=float, required=True)
    bound_p.add_argument("--beta", type=float, required=True)
    bound_p.add_argument("--lambda", dest="lam", type=float, required=True)
    bound_p.add_argument("--gamma", type=float, default=1.0)
    bound_p.add_argument("--delta", type=float, default=1.0)
    return parser


def _cmd_run(args) -> int:
    overrides = list(args.overrides)
    if args.svg:
        overrides.append("experiment.emit_svg=true")
    spec = load_config(args.config, overrides)
    result = run_experiment(spec, args.output_dir)
    for label, entry in result.manifest["methods"].items():
        final = entry.get("final", {})
        print(f"{label}: {entry['status']}, {entry['records']} records, "
              f"final mean objective {final.get('mean_objective', float('nan')):.6g}")
    return result.exit_code


def _cmd_verify(args) -> int:
    report = sanitize(run_suites(args.suite))
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
        for check in report["checks"]:
            print(f"{'PASS' if check['passed'] else 'FAIL'}  {check['suite']}: {check['name']} "
                  f"({check['measured']} {check['comparison']} {check['tolerance']})")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAILURE


def _cmd_show_bound(args) -> int:
    tc = TheoryConstants(alpha=args.alpha, L=args.L, beta=args.beta, lam=args.lam)
    smooth, lsi = step_size_bound_branches(tc, args.gamma, args.delta)
    print(f"smoothness branch: {smooth:.17g}")
    print(f"lsi branch:        {lsi:.17g}")
    print(f"bound (max):       {step_size_bound(tc, args.gamma, args.delta):.17g}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": _cmd_run, "verify": _cmd_verify, "show-bound": _cmd_show_bound}
    try:
        return handlers[args.command](args)
    except (ConfigError, ValueError, OSError) as err:
        print(f"adavol: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
