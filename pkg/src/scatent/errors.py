"""Exception types shared across the package."""


class ScatentError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(ScatentError):
    """A constructor or operation received an out-of-domain argument."""


class ConfigError(ScatentError):
    """An experiment configuration is malformed or inconsistent."""


class CoverageError(ScatentError):
    """A grid does not cover enough of a state's support."""


class NormalizationError(ScatentError):
    """An operation requiring a normalized state received one that is not."""


class DegenerateStateError(ScatentError):
    """A state with (numerically) zero norm cannot be analyzed."""


class ModeOverlapError(ScatentError):
    """Modes that must be orthogonal have a measurable overlap."""


class BoundaryConditionError(ScatentError):
    """An in-state violates the scattering boundary conditions."""


class NumericError(ScatentError):
    """A numerical invariant (unitarity, determinant, bound) failed."""
