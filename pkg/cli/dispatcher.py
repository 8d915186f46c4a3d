"""Argument parsing and command dispatch for the scalekit command line.

Builds one ``argparse`` subparser per entry in :mod:`cli.registry`, turns
the parsed namespace into a :class:`~cli.registry.RunConfig`, and routes it
to its handler.  Expected failures leave as one JSON line on stderr.
"""

import argparse
import json
import sys
from typing import NoReturn, Optional, Sequence

from pydantic import ValidationError

import config as _config  # noqa: F401  (loads .env)
from core.logger import ScalekitLogger
from cli.registry import RunConfig, registry
from scalekit.catalog import catalog
from scalekit.exceptions import InvalidSpec, ScalekitError, UsageError

# Import handlers module so @registry.register decorators execute.
import cli.handlers as _handlers

logger = ScalekitLogger.get_logger()

PROGRAM: str = "scalekit"


class ScalekitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors raise :class:`UsageError` instead of exiting."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message, {"usage": self.format_usage().strip()})


def build_parser() -> ScalekitArgumentParser:
    """Parser with every registered subcommand; the epilog lists catalog names."""
    parser = ScalekitArgumentParser(
        prog=PROGRAM,
        description="Scale-invariant maximum-entropy distributions.",
        epilog="catalog entries: " + ", ".join(catalog.names()),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, entry in registry.entries().items():
        sub = commands.add_parser(name, help=entry.description, description=entry.description)
        entry.arguments(sub)
    return parser


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Parse *argv* into a validated :class:`RunConfig`.

    Raises:
        UsageError: unknown subcommand, flag or choice (exit 2).
        ParameterOutOfDomain: a catalog parameter is outside its domain.
    """
    params = vars(build_parser().parse_args(list(argv)))
    command = params.pop("command")
    output_path = params.pop("out", None)
    output_format = params.pop("format", None) or "csv"
    config = RunConfig(command=command, params=params, output_path=output_path, format=output_format)
    _handlers.validate(config)
    return config


def execute(config: RunConfig) -> int:
    """Run *config* and return its exit code."""
    logger.debug("Dispatching command", extra={"command": config.command, "output": config.output_path})
    return registry.dispatch(config)


def report_error(error: ScalekitError) -> int:
    """Write ``{kind, message, context}`` as one line on stderr and return the exit code."""
    sys.stderr.write(json.dumps(error.to_dict(), default=str, sort_keys=True) + "\n")
    logger.info("Command failed", extra={"kind": error.kind, "error": error.message})
    return error.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point: parse, execute, and map expected failures to exit codes."""
    try:
        return execute(parse_args(sys.argv[1:] if argv is None else argv))
    except ScalekitError as exc:
        return report_error(exc)
    except ValidationError as exc:
        return report_error(InvalidSpec("invalid specification", {"errors": exc.errors(include_url=False)}))
