"""Shared exception types.

Everything raised on purpose by this package derives from ``TangencyLabError``
so callers can catch one base class.  ``CascadeEnd`` is a control signal (the
box cascade terminated normally), not a failure.
"""

from __future__ import annotations

__all__ = [
    "TangencyLabError",
    "DomainError",
    "ConfigError",
    "ChartExitError",
    "NumericError",
    "NoVerticalTangencyError",
    "WindowExceededError",
    "SmallExpandingViolationError",
    "WrongQuadrantError",
    "SlopeLemmaCounterexample",
    "InconclusiveError",
    "NotFoundError",
    "CascadeEnd",
]


class TangencyLabError(Exception):
    """Base class for all errors raised by tangencylab."""


class DomainError(TangencyLabError, ValueError):
    """Input outside the domain an operation is defined on."""


class ConfigError(TangencyLabError, ValueError):
    """Malformed or inconsistent experiment configuration."""


class ChartExitError(TangencyLabError):
    """An orbit or region left the linearizing chart it must stay in."""


class NumericError(TangencyLabError):
    """An iterative solver failed to converge.

    Carries the final residual so the failure is reportable.
    """

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)
        self.residual = residual


class NoVerticalTangencyError(TangencyLabError):
    """The image arc has no vertical tangency for this sign case / index."""


class WindowExceededError(TangencyLabError):
    """A required parameter or rectangle does not fit inside its window."""


class SmallExpandingViolationError(TangencyLabError):
    """A small-expanding-rate requirement failed (integer window or
    rectangle membership after the return iterate)."""


class WrongQuadrantError(TangencyLabError):
    """A projected coordinate has the wrong sign for the requested machinery."""


class SlopeLemmaCounterexample(TangencyLabError):
    """A transported slope violated its bound.  Diagnostic: expected only
    when the expansion rate is too large for the slope transport estimates."""

    def __init__(self, message: str, *, point=None, slope=None, bound=None):
        super().__init__(message)
        self.point = point
        self.slope = slope
        self.bound = bound


class InconclusiveError(TangencyLabError):
    """An adaptive search exhausted its budget without a definite answer."""


class NotFoundError(TangencyLabError):
    """An exhaustive grid search finished without finding a witness."""


class CascadeEnd(TangencyLabError):
    """Normal termination signal: the next box would leave the return
    rectangle, so the cascade stops at the current depth."""
