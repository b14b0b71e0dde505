"""Exception types shared across the package."""


class ZsphError(Exception):
    """Base class for all package errors."""


class InvalidResolutionError(ZsphError, ValueError):
    """Matrix size N is too small or inconsistent."""


class TruncationOverflowError(ZsphError, ValueError):
    """A spherical-harmonic degree exceeds the resolution limit N-1."""


class ZeroMeanViolationError(ZsphError, ValueError):
    """A vorticity state carries a nonzero mean (trace) where none is allowed."""


class ShapeError(ZsphError, ValueError):
    """Array dimensions do not match the expected resolution."""


class CorruptCacheError(ZsphError, IOError):
    """A basis cache file is truncated, has a bad magic, or a bad version."""


class ResolutionMismatchError(ZsphError, IOError):
    """A basis cache file holds a different N than requested."""


class InternalConsistencyError(ZsphError, RuntimeError):
    """A structural assertion failed (signals a wrong generator construction)."""


class StepFailureError(ZsphError, RuntimeError):
    """A time step could not be completed."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvalidStepError(ZsphError, ValueError):
    """Step size outside the valid range for the stochastic scheme."""


class AggregationError(ZsphError, ValueError):
    """Time series cannot be aggregated (mismatched sample grids)."""


class EnsembleError(ZsphError, RuntimeError):
    """All realizations of an ensemble failed."""
