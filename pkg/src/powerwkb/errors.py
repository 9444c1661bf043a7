"""Exception types shared across the package."""

from __future__ import annotations

from typing import Any


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance.

    The best available estimate and its error bound travel with the
    exception so callers can decide whether to accept them.
    """

    def __init__(self, message: str, best_estimate: Any = None, error_bound: Any = None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_bound = error_bound


class BracketError(ConvergenceError):
    """Eigenvalue bracketing failed, usually because the box is too small."""


class FitError(ConvergenceError):
    """Least-squares fit failed; ``best_estimate`` holds the best candidate."""
