"""Command-line front end.

    entroflux run --preset paper-case-1 --out runs/case1
    entroflux run --config my_run.cfg --closure naive
    entroflux compare --preset paper-case-2
    entroflux stability-scan --preset paper-case-2
    entroflux dump-preset sod-euler

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 invalid state.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import driver
from .errors import ConfigError, UnknownPreset
from .presets import PRESET_NAMES, dump_config, parse_config, preset


def _add_source_args(sub: argparse.ArgumentParser, require: bool = True) -> None:
    group = sub.add_mutually_exclusive_group(required=require)
    group.add_argument("--preset", choices=PRESET_NAMES, help="named run configuration")
    group.add_argument("--config", metavar="FILE", help="flat key = value config file")


def _load_config(args):
    if args.preset:
        cfg = preset(args.preset)
    else:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        cfg = parse_config(path.read_text())
    if getattr(args, "closure", None):
        cfg = replace(cfg, closure=args.closure)
    if getattr(args, "out", None):
        cfg = replace(cfg, out_dir=args.out)
    if getattr(args, "snapshots", None) is not None:
        cfg = replace(cfg, snapshots=args.snapshots)
    if getattr(args, "projection", None):
        cfg = replace(cfg, projection=args.projection)
    return cfg.validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entroflux", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration and write artifacts")
    _add_source_args(p_run)
    p_run.add_argument("--closure", choices=("naive", "entropic-full", "entropic-scalar"),
                       help="override the closure strategy")
    p_run.add_argument("--out", metavar="DIR", help="output directory")
    p_run.add_argument("--snapshots", type=int, metavar="K",
                       help="number of intermediate snapshots")
    p_run.add_argument("--projection", choices=("limited", "plain"),
                       help="re-projection variant")

    p_cmp = sub.add_parser("compare", help="naive vs entropic closure, side by side")
    _add_source_args(p_cmp)
    p_cmp.add_argument("--out", metavar="DIR", help="output directory")

    p_scan = sub.add_parser("stability-scan",
                            help="bisect a lambda grid for the closure stability gap")
    _add_source_args(p_scan)
    p_scan.add_argument("--out", metavar="DIR", help="output directory")

    p_dump = sub.add_parser("dump-preset", help="print a preset as a config file")
    p_dump.add_argument("name", choices=PRESET_NAMES)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "dump-preset":
            sys.stdout.write(dump_config(preset(args.name)))
            return driver.EXIT_OK
        cfg = _load_config(args)
        if args.command == "run":
            return driver.run_and_report(cfg)
        if args.command == "compare":
            summary = driver.compare_closures(cfg, out_dir=args.out)
            for key in sorted(summary):
                print(f"{key} = {summary[key]}")
            return driver.EXIT_OK
        if args.command == "stability-scan":
            report = driver.stability_scan(cfg, out_dir=args.out or cfg.out_dir)
            print(f"found_lambda = {report['found_lambda']}")
            return driver.EXIT_OK
    except (ConfigError, UnknownPreset) as err:
        print(f"config error: {err}", file=sys.stderr)
        return driver.EXIT_CONFIG
    return driver.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
