"""Exception hierarchy for scalekit.

Every error carries a machine-readable ``kind`` (the class name), a human
message, and a ``context`` dict.  The CLI serializes these as one JSON line.
"""

from typing import Any, Dict, Optional


class ScalekitError(Exception):
    """Base exception for expected numerical and domain failures.

    Attributes:
        kind: Stable error identifier, equal to the concrete class name.
        message: Human-readable description.
        context: Extra values that explain the failure (parameters, bounds).
    """

    exit_code: int = 1

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        """Initialise with a message and optional context mapping."""
        self.kind = type(self).__name__
        self.message = message
        self.context = dict(context or {})
        super().__init__(f"{self.kind}: {message}")

    def to_dict(self) -> Dict[str, Any]:
        """Return the ``{kind, message, context}`` error object."""
        return {"kind": self.kind, "message": self.message, "context": self.context}


class DomainError(ScalekitError):
    """A point lies outside the domain of a scale, map or transform."""


class DegenerateInput(ScalekitError):
    """Inputs do not determine the requested quantity (e.g. constant values)."""


class DivergentIntegral(ScalekitError):
    """The unnormalized density is not integrable over its support."""


class NoBracket(ScalekitError):
    """No multiplier in the searched range attains the target mean."""


class InfeasibleConstraint(ScalekitError):
    """The target mean lies outside the convex hull of the scale values."""


class UnknownDistribution(ScalekitError):
    """The requested catalog name is not registered."""


class ParameterOutOfDomain(ScalekitError):
    """A catalog parameter is missing, unknown, or outside its domain."""


class NonMonotoneMap(ScalekitError):
    """A change-of-variable map is not strictly monotone on its support."""


class GridTooNarrow(ScalekitError):
    """The Fourier grid does not resolve the decay of the characteristic function."""


class RingingExceedsTolerance(ScalekitError):
    """Negative lobes after Fourier inversion are too large to clip."""


class UnknownScenario(ScalekitError):
    """The requested Monte Carlo scenario is not shipped."""


class InvalidSpec(ScalekitError):
    """A specification is structurally invalid for the requested operation."""


class UsageError(ScalekitError):
    """Command-line arguments could not be parsed."""

    exit_code = 2
