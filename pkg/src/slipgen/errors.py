"""Exception types shared across the package."""


class SlipgenError(Exception):
    """Base class for all slipgen errors."""


class ConfigError(SlipgenError):
    """Invalid or inconsistent run configuration."""


class FormatError(ConfigError):
    """Malformed input file.  Carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class InvalidGeometryError(ConfigError):
    """Fault geometry violates a structural invariant."""


class InvalidGridError(ConfigError):
    """Degenerate observation grid request."""


class NumericalError(SlipgenError):
    """Numerical precondition or stability failure."""


class DomainError(NumericalError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateTaperError(NumericalError):
    """Depth taper vanishes on every patch."""


class NotPositiveSemidefiniteError(NumericalError):
    """Matrix has a significantly negative eigenvalue."""


class TruncationError(NumericalError):
    """More expansion terms requested than the basis provides."""


class SaturationError(NumericalError):
    """Overflow in the exponential of a lognormal field."""


class UnsupportedGeometryError(NumericalError):
    """Geometry outside the deformation model's range (e.g. surface-breaking patch)."""


class UnsupportedDistributionError(NumericalError):
    """Operation defined for one distribution kind only."""


class DegenerateSampleError(NumericalError):
    """Sample set has no spread, or too few points, for density estimation."""
