"""Exception types raised across the package."""


class MinlagError(Exception):
    """Base class for all package errors."""


class DomainError(MinlagError, ValueError):
    """An argument lies outside the domain of the function."""


class DegenerateQuadruple(MinlagError, ValueError):
    """Two points of a boundary quadruple coincide, or the order is wrong."""


class NonPositiveMetric(MinlagError, ValueError):
    """A metric (or SPD tensor) failed to be positive definite."""


class NoConvergence(MinlagError, RuntimeError):
    """An iterative routine stopped before meeting its tolerance."""


class BisectionFailure(MinlagError, RuntimeError):
    """A root bracket could not be established."""
