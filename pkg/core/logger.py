"""ScalekitLogger: one JSON-lines logger shared by the CLI and the numerical library.

Numerical routines attach their context through ``extra`` (``psi``,
``lambda``, brackets, seeds, KS verdicts).  Those values are often numpy
scalars, arrays or non-finite floats, so the formatter converts them to
strict JSON before writing.  Records go to stderr and, when
``SCALEKIT_LOG_DIR`` is non-empty, to a rotating ``scalekit.log``.
The level comes from ``SCALEKIT_LOG_LEVEL`` and defaults to ``WARNING``.
"""

import json
import logging
import math
import os
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from typing import Any, List, Optional, Tuple

import numpy as np

LOGGER_NAME: str = "scalekit"
LOG_FILE: str = "scalekit.log"
MAX_BYTES: int = 5 * 1024 * 1024
BACKUP_COUNT: int = 5

# Arrays longer than this are summarized rather than dumped.
ARRAY_PREVIEW: int = 8

_RESERVED: frozenset[str] = frozenset(
    logging.LogRecord("", 0, "", 0, "", (), None).__dict__
) | {"message", "asctime"}


def _jsonable(value: Any) -> Any:
    """Convert numpy values and non-finite floats into strict-JSON equivalents."""
    if isinstance(value, np.ndarray):
        if value.size <= ARRAY_PREVIEW:
            return [_jsonable(item) for item in value.tolist()]
        finite = value[np.isfinite(value)] if value.dtype.kind == "f" else value
        summary = {"shape": list(value.shape)}
        if finite.size:
            summary.update(min=_jsonable(finite.min()), max=_jsonable(finite.max()))
        return summary
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


class _JsonFormatter(logging.Formatter):
    """One JSON object per record: fixed fields first, then the ``extra`` context."""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "func_name": record.funcName,
        }
        context = {key: value for key, value in vars(record).items() if key not in _RESERVED}
        for key, value in context.items():
            entry.setdefault(key, _jsonable(value))
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, ensure_ascii=False, allow_nan=False, default=str)


def _resolve_level(raw: Optional[str]) -> int:
    """Map a level name such as ``"info"`` to its numeric value; unknown names give WARNING."""
    if not raw:
        return logging.WARNING
    level = logging.getLevelName(raw.strip().upper())
    return level if isinstance(level, int) else logging.WARNING


def _build_handlers(log_dir: str) -> Tuple[List[logging.Handler], Optional[str]]:
    """stderr handler plus a rotating file under *log_dir*; the second item is a file-setup error."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if not log_dir:
        return handlers, None
    try:
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(RotatingFileHandler(
            os.path.join(log_dir, LOG_FILE), maxBytes=MAX_BYTES, backupCount=BACKUP_COUNT, encoding="utf-8",
        ))
    except OSError as exc:
        return handlers, str(exc)
    return handlers, None


class ScalekitLogger:
    """Owner of the shared ``scalekit`` logger.

    Usage::

        from core.logger import ScalekitLogger

        logger = ScalekitLogger.get_logger()
        logger.info("Normalized density", extra={"psi": psi, "grid_points": 4096})
    """

    _instance: Optional["ScalekitLogger"] = None

    def __init__(self, level: int, log_dir: str) -> None:
        self.logger = logging.getLogger(LOGGER_NAME)
        self.logger.setLevel(level)
        self.logger.propagate = False
        if self.logger.handlers:
            return
        formatter = _JsonFormatter()
        handlers, failure = _build_handlers(log_dir)
        for handler in handlers:
            handler.setLevel(level)
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)
        if failure:
            self.logger.warning("File logging unavailable; using stderr only", extra={"log_dir": log_dir, "error": failure})

    @classmethod
    def get_logger(cls, level: Optional[int] = None) -> logging.Logger:
        """Return the shared logger, configuring it from the environment on first use.

        *level* only takes effect on that first call.
        """
        if cls._instance is None:
            cls._instance = cls(
                level if level is not None else _resolve_level(os.environ.get("SCALEKIT_LOG_LEVEL")),
                os.environ.get("SCALEKIT_LOG_DIR", "logs"),
            )
        return cls._instance.logger

    def close(self) -> None:
        """Flush and detach every handler."""
        for handler in list(self.logger.handlers):
            handler.flush()
            handler.close()
            self.logger.removeHandler(handler)
