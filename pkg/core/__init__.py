"""Core plumbing: structured logging and atomic file output.

This package is framework-agnostic. It must NEVER import from ``scalekit/`` or ``cli/``.
"""

from core.logger import ScalekitLogger
from core.storage import render_csv, render_json, write_atomic, write_csv, write_json

__all__ = [
    "ScalekitLogger",
    "render_csv",
    "render_json",
    "write_atomic",
    "write_csv",
    "write_json",
]
