"""Application configuration: environment variables and derived constants.

Loads ``SCALEKIT_SEED`` from the environment via ``python-dotenv``.  The
logging variables (``SCALEKIT_LOG_LEVEL``, ``SCALEKIT_LOG_DIR``) are read by
:class:`core.logger.ScalekitLogger` itself.  Values are resolved at import
time so other modules can ``from config import …`` without repeated lookups.
"""

# stdlib
import os

# third-party
from dotenv import load_dotenv

# core
from core.logger import ScalekitLogger

# Environment bootstrap
load_dotenv()

logger = ScalekitLogger.get_logger()

DEFAULT_SEED: int = 42
SEED_VARIABLE: str = "SCALEKIT_SEED"


# Helper functions


def _parse_seed(raw: str | None) -> int:
    """Parse a nonnegative integer seed, falling back to :data:`DEFAULT_SEED`."""
    if raw is None or not raw.strip():
        return DEFAULT_SEED
    try:
        seed = int(raw.strip())
    except ValueError:
        logger.warning("Ignoring non-integer seed", extra={"variable": SEED_VARIABLE, "value": raw})
        return DEFAULT_SEED
    if seed < 0:
        logger.warning("Ignoring negative seed", extra={"variable": SEED_VARIABLE, "value": raw})
        return DEFAULT_SEED
    return seed


def default_seed() -> int:
    """Seed for simulations when no ``--seed`` flag is given; re-reads the environment."""
    return _parse_seed(os.environ.get(SEED_VARIABLE))


# Public constants

SEED: int = default_seed()


# Startup diagnostics

logger.debug("Config loaded", extra={"seed": SEED})
