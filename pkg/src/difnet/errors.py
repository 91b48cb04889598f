"""Exception types shared across the difnet modules."""


class DifnetError(Exception):
    """Base class for all difnet errors."""


class NotConnected(DifnetError):
    """Random graph generation failed to produce a connected graph."""


class InvalidParams(DifnetError):
    """Generator parameters are outside their admissible range."""


class NumericalFailure(DifnetError):
    """A numerical routine (eigensolver) did not converge."""


class NoRoot(DifnetError):
    """Bisection bracket does not contain a sign change."""


class InvalidCount(DifnetError):
    """Requested informed-node count is outside [1, N]."""


class BadList(DifnetError):
    """Explicit informed-node list contains invalid indices."""


class StabilityViolation(DifnetError):
    """Resolved step-size violates the small-step stability bound."""


class Divergence(DifnetError):
    """Simulated network squared error exceeded the divergence guard."""

    def __init__(self, message, run_index=None):
        super().__init__(message)
        self.run_index = run_index


class NotConverged(DifnetError):
    """Trajectory window is not flat enough for a steady-state read-out."""


class DimensionOverflow(DifnetError):
    """Dense error-system matrices would exceed the configured size limit."""


class NoConvergence(DifnetError):
    """Iterative solver hit its iteration cap before reaching tolerance."""


class EtaTooSmall(DifnetError):
    """Network degree too small for the spectral-density approximation."""


class DomainError(DifnetError):
    """Scalar function argument outside its domain."""


class ConfigError(DifnetError):
    """Experiment configuration is malformed; message names the key path."""
