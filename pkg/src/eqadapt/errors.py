"""Exception types shared across the package."""


class EqAdaptError(Exception):
    """Base class for all eqadapt errors."""


class DimensionError(EqAdaptError):
    """Operands have inconsistent shapes."""


class RankDeficient(EqAdaptError):
    """Constraint matrix does not have full row rank at the working tolerance."""


class InfeasibleInitialEstimate(EqAdaptError):
    """Supplied parameter estimate does not satisfy the equality constraint."""


class Diverged(EqAdaptError):
    """Simulation state exceeded the overflow guard or became non-finite."""


class ValidationError(EqAdaptError):
    """A configuration or invariant check failed; the message names the violation."""


class ParseError(EqAdaptError):
    """Scenario file could not be parsed."""


class MissingFE(EqAdaptError):
    """Concurrent-learning run never reached the finite-excitation threshold."""
