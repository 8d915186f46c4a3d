"""Atomic file output for tables and reports.

Every write goes to a ``tempfile`` in the destination directory and is then
moved into place with ``os.replace``, so readers never observe a partial file.
"""

import json
import os
import tempfile
from typing import Any, Iterable, Sequence

from core.logger import ScalekitLogger

logger = ScalekitLogger.get_logger()

# Full round-trip precision for doubles.
FLOAT_FORMAT: str = "%.17g"


def format_number(value: Any) -> str:
    """Render *value* for CSV output (floats at 17 significant digits)."""
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return FLOAT_FORMAT % float(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Return CSV text with a header row and LF line endings."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(cell) for cell in row))
    return "\n".join(lines) + "\n"


def render_json(payload: Any) -> str:
    """Return stable, indented JSON text ending with a newline."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> str:
    """Write *text* to *path* atomically and return the absolute path."""
    target = os.path.abspath(path)
    dir_name = os.path.dirname(target) or "."
    tmp_path: str | None = None
    try:
        os.makedirs(dir_name, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", dir=dir_name, delete=False, suffix=".tmp", newline="\n", encoding="utf-8"
        ) as tmp:
            tmp.write(text)
            tmp_path = tmp.name
        os.replace(tmp_path, target)
        logger.debug("Persisted output", extra={"path": target, "bytes": len(text)})
    except OSError as exc:
        logger.error("Failed to persist output", extra={"path": target, "error": str(exc)})
        if tmp_path and os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return target


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Atomically write a CSV table."""
    return write_atomic(path, render_csv(header, rows))


def write_json(path: str, payload: Any) -> str:
    """Atomically write a JSON document."""
    return write_atomic(path, render_json(payload))
