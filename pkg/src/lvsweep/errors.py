"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter violates its documented domain."""


class RegimeError(ParameterError):
    """Requested prediction is undefined for these parameters (no sweep)."""


class ValidationError(ValueError):
    """An experiment specification failed validation."""


class NumericalError(RuntimeError):
    """An integrator or root search could not reach its tolerance."""


class InsufficientSampleError(RuntimeError):
    """Too few conditioned replicates to report statistics."""
