"""Command-line entry point.

    dqc1bench run CONFIG.json [--out DIR] [--seed N] [--now T] [--infinite-shots] [--dump-circuit]
    dqc1bench {trace-sweep,visibility,knots,oracle} [--config CONFIG.json] [same flags]
    dqc1bench report BUNDLE [BUNDLE ...] [--out DIR] [--logy]
    dqc1bench schema

Exit codes: 0 success, 2 invalid config or arguments, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from . import config as cfgmod
from .noise import format_time, parse_time
from .report import ReportError, report
from .runner import __version__, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output bundle directory (default: config 'out', then $DQC1BENCH_OUT/<suite>)")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--now", help="timestamp for drift, e.g. 2019-03-01T00:00:00Z")
    p.add_argument("--infinite-shots", action="store_true", help="exact expectations instead of shot sampling")
    p.add_argument("--dump-circuit", action="store_true", help="also write the compiled circuits to circuits.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqc1bench", description="DQC1 trace-estimation benchmarks")
    parser.add_argument("--version", action="version", version=f"dqc1bench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the suite named in a config file")
    p.add_argument("config", help="experiment config (JSON)")
    _add_run_flags(p)

    for suite in cfgmod.SUITES:
        p = sub.add_parser(suite, help=f"run the {suite} suite")
        p.add_argument("--config", help="experiment config (JSON); defaults are used without one")
        _add_run_flags(p)

    p = sub.add_parser("report", help="regenerate plots and report.md from bundle CSVs")
    p.add_argument("bundles", nargs="+", help="one bundle, or several knots bundles to overlay")
    p.add_argument("--out", help="where to write (default: the first bundle)")
    p.add_argument("--logy", action="store_true", help="log-scale visibility axis")

    sub.add_parser("schema", help="print the config JSON schema")
    return parser


def resolve_config(args) -> cfgmod.ExperimentConfig:
    """Effective config: file (or suite defaults) with command-line overrides."""
    path = args.config
    if path is not None:
        cfg = cfgmod.load(path)
        if args.command != "run" and cfg.suite != args.command:
            raise cfgmod.ConfigError(
                f"invalid config at 'suite': file says {cfg.suite!r} but the {args.command!r} command was used"
            )
    else:
        cfg = cfgmod.default_config(args.command)
    changes = {}
    if args.seed is not None:
        if args.seed < 0:
            raise cfgmod.ConfigError("invalid config at 'seed': must be >= 0")
        changes["seed"] = args.seed
    if args.now is not None:
        try:
            changes["now"] = format_time(parse_time(args.now))
        except ValueError as exc:
            raise cfgmod.ConfigError(f"invalid config at 'now': {exc}") from exc
    if args.infinite_shots:
        changes["shots"] = 0
    if args.out is not None:
        changes["out"] = args.out
    if changes:
        # re-validate through the dict form so overrides obey the schema too
        cfg = cfgmod.from_dict({**cfg.to_dict(), **changes})
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    if args.command == "schema":
        sys.stdout.write(cfgmod.schema_json())
        return EXIT_OK

    if args.command == "report":
        try:
            paths = report(args.bundles, args.out, logy=args.logy)
        except (ReportError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        for p in paths:
            print(p)
        return EXIT_OK

    try:
        cfg = resolve_config(args)
    except cfgmod.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        bundle = run(cfg, dump_circuit=args.dump_circuit)
    except ValueError as exc:
        # parameter combinations the schema cannot express (e.g. N outside the preset)
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {bundle.path} ({bundle.duration:.1f} s)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
