"""
Command line front end: ``qnet <command> --config <path> [--out <path>] [--format csv|json] [--seed <n>] [--jobs <n>]``

``qnet list`` prints the registered commands and their configuration modes.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from qnet import commands
from qnet.conf import settings
from qnet.core import RunContext, registry
from qnet.exceptions import EXIT_FAILURE, EXIT_SUCCESS, ConfigurationError, QnetError
from qnet.handlers import WRITERS, ConfigHandler

logger = logging.getLogger(__name__)

LIST_COMMAND = "list"


def _non_negative(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return number


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnet", description="Simulate cascaded quantum networks of giant unidirectional emitters."
    )
    parser.add_argument("command", help=f'Command to run, or "{LIST_COMMAND}" to print the available commands.')
    parser.add_argument("--config", type=Path, help="JSON configuration of the run.")
    parser.add_argument("--out", type=Path, help="Output file (default: standard output).")
    parser.add_argument("--format", choices=sorted(WRITERS), help="Output format (default: from --out, else csv).")
    parser.add_argument("--seed", type=_non_negative, help="Seed of the random number generators.")
    parser.add_argument(
        "--jobs", type=_positive, help=f"Parallel workers for sweeps (default: {settings.QNET_DEFAULT_JOBS})."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeatable).")
    parser.add_argument("-q", "--quiet", action="store_true", help="Only log errors.")
    return parser


def configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    logging.captureWarnings(True)


def print_commands() -> None:
    for cmd in registry.get_all_commands():
        sys.stdout.write(f"{cmd.name:<16}{cmd.help}\n")
        sys.stdout.write(f"{'':<16}modes: {', '.join(cmd.modes)}\n")


def output_format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    if args.out is not None and args.out.suffix.lstrip(".") in WRITERS:
        return args.out.suffix.lstrip(".")
    return "csv"


def run(args: argparse.Namespace) -> None:
    cmd = registry.get_command(args.command)
    if cmd is None:
        choices = ", ".join(registry.get_all_command_names())
        raise ConfigurationError(f'unknown command "{args.command}", one of {choices}')
    if args.config is None:
        raise ConfigurationError(f"{cmd.name} needs a configuration, given with --config")
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"unable to read {args.config}: {exc.strerror}") from None

    config = ConfigHandler(cmd.name, cmd.modes).parse(text)
    logger.info("Running %s (%s mode) from %s", cmd.name, config["mode"], args.config)
    dataset = cmd.execute(config, RunContext(cmd.name, args.seed, args.jobs))
    dataset.meta.setdefault("mode", config["mode"])
    if args.seed is not None:
        dataset.meta.setdefault("seed", args.seed)

    writer = WRITERS[output_format(args)]()
    if args.out is None:
        sys.stdout.write(writer.dumps(dataset))
    else:
        writer.write(dataset, args.out)
    logger.info("%s finished with %d rows", cmd.name, len(dataset))


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    registry.register_module(commands)

    if args.command == LIST_COMMAND:
        print_commands()
        return EXIT_SUCCESS

    try:
        run(args)
    except QnetError as exc:
        logger.error(exc, exc_info=settings.QNET_LOG_EXCEPTIONS)
        return exc.exit_code
    except Exception as exc:
        logger.error("Unexpected error: %s", exc, exc_info=True)
        return EXIT_FAILURE
    return EXIT_SUCCESS
