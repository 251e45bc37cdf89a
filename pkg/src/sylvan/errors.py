"""Exception types shared across the package."""

from __future__ import annotations


class SylvanError(Exception):
    """Base class for every error raised by sylvan."""


class InvalidInput(SylvanError, ValueError):
    """Input violates a documented precondition."""


class ParseError(InvalidInput):
    """Text could not be parsed; ``location`` says where."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class DivisionByZero(SylvanError, ZeroDivisionError):
    pass


class EvaluationFailure(SylvanError):
    """Random evaluation kept hitting a zero denominator."""


class TilingTooCoarse(SylvanError):
    """Box tiling covers less than 1 - eps of the target."""


class InternalError(SylvanError):
    """An invariant that holds by construction was violated."""


class NotStabilized(SylvanError):
    """A limit did not stabilize; the partial report is attached."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
