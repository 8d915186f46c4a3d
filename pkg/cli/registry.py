"""Subcommand registry: one source of truth for name, arguments and handler.

Handlers in :mod:`cli.handlers` declare themselves with ``@registry.register``
together with a function that adds their flags to an ``argparse`` subparser.
:mod:`cli.dispatcher` builds the parser from the registry and routes a parsed
:class:`RunConfig` back to the handler.
"""

from __future__ import annotations

import argparse
import dataclasses
from typing import Any, Callable, Dict, Literal, Optional, Protocol, runtime_checkable

from pydantic import BaseModel, ConfigDict, Field

Command = Literal["catalog", "eval", "entropy", "transform", "simulate", "invariance", "verify"]


class RunConfig(BaseModel):
    """A fully parsed invocation."""

    command: Command
    params: Dict[str, Any] = Field(default_factory=dict)
    output_path: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    model_config = ConfigDict(frozen=True, extra="forbid")


@runtime_checkable
class Handler(Protocol):
    """Runs one subcommand and returns its exit code."""
    def __call__(self, config: RunConfig) -> int: ...  # noqa: E704


ArgumentBuilder = Callable[[argparse.ArgumentParser], None]


@dataclasses.dataclass(frozen=True, slots=True)
class CommandEntry:
    """Metadata for a single subcommand."""
    command: str                  # e.g. "eval"
    description: str              # shown in --help
    handler: Handler
    arguments: ArgumentBuilder    # adds the subcommand's flags


class CommandRegistry:
    """Singleton subcommand registry.

    Usage::

        @registry.register("verify", description="Check a catalog entry",
                           arguments=_verify_arguments)
        def handle_verify(config: RunConfig) -> int: ...

        exit_code = registry.dispatch(config)
    """

    _instance: CommandRegistry | None = None
    _entries: dict[str, CommandEntry]

    def __new__(cls) -> CommandRegistry:
        if cls._instance is None:
            inst = super().__new__(cls)
            inst._entries = {}
            cls._instance = inst
        return cls._instance

    def register(
        self,
        command: str,
        *,
        description: str,
        arguments: ArgumentBuilder,
    ) -> Callable[[Handler], Handler]:
        """Decorator that registers *handler* for *command*."""
        def decorator(func: Handler) -> Handler:
            self._entries[command] = CommandEntry(
                command=command,
                description=description,
                handler=func,
                arguments=arguments,
            )
            return func
        return decorator

    def get(self, command: str) -> CommandEntry | None:
        return self._entries.get(command)

    def entries(self) -> dict[str, CommandEntry]:
        """Return a copy of all registered subcommands."""
        return dict(self._entries)

    def dispatch(self, config: RunConfig) -> int:
        """Invoke the handler for ``config.command``; 2 when none is registered."""
        entry = self._entries.get(config.command)
        if entry is None:
            return 2
        return entry.handler(config)


registry: CommandRegistry = CommandRegistry()
