"""
Command-line entry point: ``python -m povm_coherence <command> [flags]``.

Results are JSON (or CSV for landscapes) on stdout; logs and error messages go to stderr.
Exit codes: 0 success, 1 trine suite failed, 2 input, validation or solver error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from core.configuration.configuration import Configuration
from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.registry import discover_and_register, registered_commands
from povm_coherence import __version__
from povm_coherence.enums.extension_kind import ExtensionKind
from povm_coherence.enums.output import OutputFormat
from povm_coherence.errors import PovmCoherenceError

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_ERROR = 2


def _shared_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    group = shared.add_argument_group("shared options")
    group.add_argument("--config", default=None, help="key=value config file (overrides POVM_CONFIG_PATH)")
    group.add_argument("--tol", type=float, default=None, help="Validation tolerance")
    group.add_argument("--feas-threshold", dest="feas_threshold", type=float, default=None,
                       help="PIC feasibility threshold on the maximized slack")
    group.add_argument("--solver-tol", dest="solver_tol", type=float, default=None, help="SDP solver tolerance")
    group.add_argument("--max-iters", dest="max_iters", type=int, default=None, help="SDP iteration limit")
    group.add_argument("--kind", choices=[k.value for k in ExtensionKind], default=None,
                       help="Naimark extension used by SDP commands")
    group.add_argument("--grid", default=None, help="Sphere grid NxM (azimuths x polar angles)")
    group.add_argument("--seed", type=int, default=None, help="Seed for randomized searches")
    group.add_argument("--threads", type=int, default=None, help="Worker threads for landscapes")
    group.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default=None)
    group.add_argument("--out", default=None, help="Output file (landscapes)")
    group.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    return shared


def build_parser() -> argparse.ArgumentParser:
    discover_and_register(Constants.COMMAND_PACKAGE)
    parser = argparse.ArgumentParser(prog="povm_coherence",
                                     description="POVM-based coherence: measures, Naimark extensions and SDPs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    shared = _shared_flags()
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for command_cls in registered_commands():
        cmd_parser = sub.add_parser(command_cls.name, aliases=list(command_cls.aliases), parents=[shared],
                                    help=command_cls.help, description=command_cls.help)
        command_cls.add_arguments(cmd_parser)
        cmd_parser.set_defaults(command_cls=command_cls)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    Logger.setup_logging("DEBUG" if args.verbose else os.getenv("LOG_LEVEL", "WARNING"))

    try:
        cfg = Configuration.from_sources(
            cli_config_path=args.config,
            tol=args.tol,
            feas_threshold=args.feas_threshold,
            solver_tol=args.solver_tol,
            max_iters=args.max_iters,
            kind=args.kind,
            grid=args.grid,
            seed=args.seed,
            threads=args.threads,
            output_format=args.output_format,
        )
        Logger.info(f"Running '{args.command}' with {cfg.to_dict()}")
        return args.command_cls(cfg).run(args)
    except (PovmCoherenceError, OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as e:
        Logger.error(f"'{args.command}' failed: {type(e).__name__}: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
