"""Exception hierarchy shared across the package."""

from __future__ import annotations


class BeliefBenchError(Exception):
    """Base class for all package errors."""


class DomainError(BeliefBenchError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class NoInteriorModeError(DomainError):
    """Raised when a Beta distribution has no interior mode (alpha <= 1 or beta <= 1)."""


class ValidationError(BeliefBenchError, ValueError):
    """A structured input failed validation.

    ``path`` locates the offending field, e.g. ``("bin_counts",)`` or
    ``("samples", 3)``.
    """

    def __init__(self, message: str, path: tuple = ()):
        self.path = tuple(path)
        if self.path:
            message = f"{'.'.join(str(p) for p in self.path)}: {message}"
        super().__init__(message)


class MissingFitError(BeliefBenchError):
    """A record lacks the fitted parameters an analysis step requires."""


class EmptyInputError(BeliefBenchError, ValueError):
    """An aggregate operation received no records."""


class UnknownStudyError(BeliefBenchError, KeyError):
    """Referenced study id does not exist."""


class UnknownSessionError(BeliefBenchError, KeyError):
    """Referenced session id does not exist."""


class StepMismatchError(BeliefBenchError):
    """A response was submitted for a step other than the session cursor."""


class AlreadyCompletedError(BeliefBenchError):
    """A completed session is immutable."""
