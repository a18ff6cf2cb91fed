"""Typed error hierarchy shared by the core and the CLI.

Every error carries a ``code`` (its class name, printed by the CLI as
``ERROR <CODE>: <detail>``) and an ``exit_code``: 2 for invalid input,
1 for numerical failures.
"""

from __future__ import annotations

from typing import Any


class FowlerError(ValueError):
    """Base class for every error raised by ``fowler_core``."""

    exit_code: int = 1

    @property
    def code(self) -> str:
        return type(self).__name__


class FowlerValidationError(FowlerError):
    """Input rejected before any computation starts."""

    exit_code = 2


# ---- validation -------------------------------------------------------------


class DimensionTooSmall(FowlerValidationError):
    pass


class InvalidComponentCount(FowlerValidationError):
    pass


class NonPositiveRadius(FowlerValidationError):
    pass


class NonPositiveScale(FowlerValidationError):
    pass


class StencilOutOfDomain(FowlerValidationError):
    pass


class BadOrdering(FowlerValidationError):
    pass


class NecksizeOutOfRange(FowlerValidationError):
    pass


class InsufficientSpan(FowlerValidationError):
    pass


class InvalidGrid(FowlerValidationError):
    pass


class InvalidStepperConfig(FowlerValidationError):
    pass


class UnknownMethod(FowlerValidationError):
    pass


class UnknownSuite(FowlerValidationError):
    pass


class InvalidRunConfig(FowlerValidationError):
    pass


class UsageError(FowlerValidationError):
    pass


# ---- numerical --------------------------------------------------------------


class NonFiniteState(FowlerError):
    pass


class StepSizeUnderflow(FowlerError):
    pass


class EmptyTrajectory(FowlerError):
    pass


class NonPositiveComponent(FowlerError):
    pass


class BracketNotFound(FowlerError):
    pass


class AmbiguousBracket(FowlerError):
    """More than one shooting bracket; all of them are attached."""

    def __init__(self, message: str, brackets: list[tuple[float, float]] | None = None) -> None:
        super().__init__(message)
        self.brackets = list(brackets or [])


class DegenerateOrbit(FowlerError):
    pass


class NoReturnDetected(FowlerError):
    pass


class NoisyData(FowlerError):
    pass


def describe(exc: FowlerError) -> dict[str, Any]:
    """Machine-readable summary used in per-row error fields."""
    return {"code": exc.code, "detail": str(exc)}
