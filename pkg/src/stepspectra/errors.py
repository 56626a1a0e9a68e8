"""Exception types shared across the package."""

from __future__ import annotations


class StepSpectraError(Exception):
    """Base class for all package-specific failures."""


class ConvergenceError(StepSpectraError):
    """An iteration hit its cap without meeting its tolerance.

    Carries the last iterate and residual so callers can diagnose or reseed.
    """

    def __init__(self, message, last_iterate=None, residual=None, trace=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.trace = trace or []


class PoleProximityError(StepSpectraError):
    """Evaluation requested too close to a trigonometric pole."""

    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class UnsupportedDomainError(StepSpectraError):
    """Special-function evaluation outside the supported (order, argument) domain."""


class SheetError(StepSpectraError):
    """A constructed spectral point landed on the wrong sheet."""


class ContourError(StepSpectraError):
    """Contour integration failed: zero suspected on the contour or a
    non-integral winding after maximal refinement.  The message advises
    how to nudge the region."""


class SchemaError(StepSpectraError):
    """Invalid potential JSON; names the offending piece index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NonSummableError(StepSpectraError):
    """A separation sum cannot be certified to converge."""
