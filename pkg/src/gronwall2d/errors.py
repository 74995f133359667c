"""Exception hierarchy shared by the solvers.

Numerical failures (blow-up, non-convergence, CFL) are distinguished from
input validation errors so the CLI can map them to different exit codes.
"""

from __future__ import annotations


class NumericalFailure(RuntimeError):
    """Base class for failures that are outcomes of the numerics, not bad input.

    ``time`` is the last time the computation reached, when meaningful.
    """

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class BoundOverflowError(NumericalFailure, ArithmeticError):
    """An exponent argument exceeded the configured cap."""


class BlowUpError(NumericalFailure):
    """A bound equation left the representable range before the horizon.

    ``trajectory`` holds the part computed before the abort.
    """

    def __init__(self, message: str, time: float, trajectory=None):
        super().__init__(message, time)
        self.trajectory = trajectory


class NoConvergenceError(NumericalFailure):
    """An iteration hit its iteration limit."""

    def __init__(self, message: str, iterations: int, last_difference: float,
                 time: float | None = None):
        super().__init__(message, time)
        self.iterations = iterations
        self.last_difference = last_difference


class CFLViolation(NumericalFailure):
    pass


class HistoryGapError(ValueError):
    """A history trajectory does not cover the requested time interval."""


class RegimeWarning(UserWarning):
    """Parameters lie outside the regime where a guarantee applies."""
