"""Command line entry point: one executable, subcommand = suite name."""

from __future__ import annotations

import argparse
import json
import sys

from .config import SUITES, ConfigError, parse_config
from .suites import SuiteContext, run_suite


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phi4sq",
        description="Spectral verification suites for the double-cutoff "
                    "quartic stochastic quantization.",
        epilog="Reports: <out-dir>/<suite>.json (checks with pass flags and "
               "the resolved configuration), <suite>_checks.csv (columns "
               "id,pass,value,target,tol), summary.json. The stationarity "
               "suite also writes a binary field snapshot.")
    sub = parser.add_subparsers(dest="suite", required=True, metavar="suite")
    for name in SUITES:
        sp = sub.add_parser(name, help=f"run the {name} suite")
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--seed", type=int, help="override the seed")
        sp.add_argument("--out-dir", help="override the output directory")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads (affects wall time only, "
                             "never results)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    doc = {}
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    else:
        text = "{}"
    try:
        doc = json.loads(text)
        doc["suite"] = args.suite
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.out_dir is not None:
            doc["out_dir"] = args.out_dir
        config = parse_config(json.dumps(doc))
    except (ConfigError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for w in config.warnings:
        print(f"warning: {w}", file=sys.stderr)
    results = run_suite(config, SuiteContext(config, threads=args.threads))
    ok = True
    for r in results:
        print(r.summary())
        ok = ok and r.passed
    print(f"overall: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
