"""Command-line front end.

Thin client over the pipeline: parse flags, load the configuration,
apply overrides, run the requested commands, print what was written.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Sequence

from . import __version__
from . import integrity_stats as istats
from .config import BUNDLED_CONFIGS, load_config, resolve_config_path
from .errors import LanesafeError
from .pipeline import COMMANDS, execute

__all__ = ["main", "build_parser"]

_RUN_COMMANDS = tuple(COMMANDS)  # risk-alloc, alert-limits, accuracy, curves, mc


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--config", default="us", metavar="PATH",
        help="configuration file, or a bundled name "
             f"({', '.join(BUNDLED_CONFIGS)}); default: us")
    shared.add_argument(
        "--output", default=None, metavar="DIR",
        help="output directory (overrides the configuration)")
    shared.add_argument(
        "--quantile-mode", choices=(istats.PAPER, istats.EXACT), default=None,
        help="Gaussian quantile handling: 'paper' rounds sigma multipliers "
             "to two decimals before forming ratios, 'exact' does not")
    shared.add_argument(
        "--paper-rounding", action=argparse.BooleanOptionalAction,
        default=None,
        help="print table values at published display precision instead of "
             "full precision")
    shared.add_argument(
        "--seed", type=int, default=None, metavar="N",
        help="unsigned 64-bit seed for the containment simulation")

    parser = argparse.ArgumentParser(
        prog="lanesafe",
        description="Localization alert limits, accuracy requirements and "
                    "integrity risk allocation for lane keeping.",
        parents=[shared])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")

    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")
    descriptions = {
        "risk-alloc": "allocate the integrity risk budget over subsystems",
        "alert-limits": "alert limits per design speed (lane-keeping table)",
        "accuracy": "required 95%% positioning accuracy per vehicle class",
        "curves": "admissible-box and alert-limit trade-off curves",
        "mc": "Monte Carlo containment check of the error model",
    }
    for name in _RUN_COMMANDS:
        sub.add_parser(name, parents=[shared], help=descriptions[name])
    sub.add_parser("all", parents=[shared],
                   help="run every command above into one output directory")

    serve = sub.add_parser("serve", parents=[shared],
                           help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_with_overrides(args: argparse.Namespace):
    config = load_config(resolve_config_path(args.config))
    overrides = {}
    if args.output is not None:
        overrides["output_dir"] = args.output
    if args.quantile_mode is not None:
        overrides["quantile_mode"] = args.quantile_mode
    if args.paper_rounding is not None:
        overrides["paper_rounding"] = args.paper_rounding
    if args.seed is not None:
        overrides["seed"] = args.seed
    return replace(config, **overrides) if overrides else config


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_with_overrides(args)
        if args.command == "serve":
            try:
                import uvicorn
            except ImportError:
                print("error: the 'serve' command needs uvicorn "
                      "(install the [server] extra)", file=sys.stderr)
                return 1
            from .service.app import create_app
            uvicorn.run(create_app(), host=args.host, port=args.port)
            return 0
        commands = list(_RUN_COMMANDS) if args.command == "all" \
            else [args.command]
        summary = execute(config, commands)
    except LanesafeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for warning in summary.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path in summary.files:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
