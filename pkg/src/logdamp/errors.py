"""Exception types raised across the package."""


class LogDampError(Exception):
    """Base class for all package errors."""


class DomainError(LogDampError, ValueError):
    """An argument lies outside the domain of a function."""


class RootNotBracketed(LogDampError):
    """A bracketing interval does not contain a sign change."""


class QuadratureFailure(LogDampError):
    """Base class for quadrature failures."""


class ToleranceNotMet(QuadratureFailure):
    """The error estimate exceeds the requested budget after max subdivisions."""


class NonFiniteIntegrand(QuadratureFailure):
    """The integrand produced NaN or infinity."""


class Divergent(QuadratureFailure):
    """The requested integral does not converge."""


class DegenerateFit(LogDampError):
    """A regression was requested on too little or too narrow data."""


class RangeError(LogDampError, ValueError):
    """Parameters fall outside the hypotheses of the law being checked."""
