"""Command-line front end: subcommand registry, handlers and dispatcher.

This package may import from ``scalekit/``, ``core/`` and ``config``.
"""

from cli.dispatcher import build_parser, execute, main, parse_args
from cli.registry import RunConfig, registry

__all__ = [
    # Registry
    "registry",
    "RunConfig",
    # Dispatcher
    "build_parser",
    "parse_args",
    "execute",
    "main",
]
