"""Command line interface package for btcgp."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from btcgp import __version__
from btcgp.config import Config
from btcgp.errors import BtcGpError, ConfigError, NumericalError, UsageError

from .bandwidth import add_bandwidth_subparser
from .common import EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, CliParser
from .experiment import add_bench_subparser, add_eval_subparser, add_simulate_subparser
from .fit import add_fit_subparser, add_predict_subparser

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> CliParser:
    """Build the root argument parser for the CLI."""
    parser = CliParser(
        prog="btcgp",
        description="btcgp – Gaussian processes with banded training covariances",
    )
    parser.add_argument("--version", action="version", version=f"btcgp {__version__}")
    parser.add_argument("--config", dest="settings_file", default=None,
                        help="Settings file (JSON/YAML); BTCGP_* environment variables take precedence")
    parser.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)
    subparsers = parser.add_subparsers(dest="command", metavar="<command>")
    add_fit_subparser(subparsers)
    add_predict_subparser(subparsers)
    add_eval_subparser(subparsers)
    add_bandwidth_subparser(subparsers)
    add_simulate_subparser(subparsers)
    add_bench_subparser(subparsers)
    return parser


def exit_code_for(exc: BaseException) -> int:
    """Documented mapping of error classes to process exit codes."""
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_DATA


def load_settings(settings_file: Optional[str]) -> Config:
    if settings_file and not Path(settings_file).exists():
        raise ConfigError(f"settings file not found: {settings_file}")
    cfg = Config(settings_file)
    issues = cfg.validate()
    if issues:
        raise ConfigError("invalid settings: " + "; ".join(issues))
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the console script."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_OK

    try:
        cfg = load_settings(args.settings_file)
        logging.basicConfig(level=args.log_level or cfg.get("log_level"), format=LOG_FORMAT, stream=sys.stderr)
        result = args.func(args, cfg)
    except (BtcGpError, OSError) as exc:
        code = exit_code_for(exc)
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return code

    if isinstance(result, int):
        return result

    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover - CLI entry point guard
    sys.exit(main())
