"""Exception types shared by all ferrohyst modules."""


class FerrohystError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(FerrohystError, ValueError):
    """A parameter violates a documented precondition (r <= 0, mismatched grids, ...)."""


class InvalidCoefficientError(FerrohystError, ValueError):
    """Negative feedback coefficient b in an inversion problem."""


class InvalidDensityError(FerrohystError, ValueError):
    """Density whose defining integrals are non-finite or malformed."""


class CutoffViolationError(FerrohystError):
    """Input (or root bracket) exceeds the memory grid cutoff R; memory would be truncated."""


class OutOfRangeError(FerrohystError):
    """Strain outside the extended working range of the shape function, or no root in range."""


class ShapeDegeneracyError(FerrohystError):
    """Shape function fell below its positive floor."""


class StepDivergenceError(FerrohystError):
    """Picard iteration of the beam stepper did not converge; reduce dt."""
