"""Exception types shared across the package."""


class SusyRitusError(Exception):
    """Base class for all package errors."""


class ConfigError(SusyRitusError, ValueError):
    """Invalid physical or run configuration."""


class DomainError(SusyRitusError, ValueError):
    """Special-function argument outside the supported domain."""


class ConvergenceError(SusyRitusError, ArithmeticError):
    """An internal series or quadrature failed its own error estimate."""


# integrate() documents NonConvergence; it is the same condition.
NonConvergence = ConvergenceError


class TailError(SusyRitusError, ArithmeticError):
    """Integrand does not decay inside the requested window."""


class StepUnderflow(SusyRitusError, ArithmeticError):
    """Finite-difference step shrank below the usable floor."""


class SingularTransformError(SusyRitusError, ArithmeticError):
    """The auxiliary solution u1 has a node, so the transform is singular."""


class UnsupportedTransformError(SusyRitusError, ValueError):
    """Requested intertwining case is not the level-addition case."""


class PoleError(SusyRitusError, ZeroDivisionError):
    """Propagator evaluated on (or too close to) its mass shell."""


class LevelError(SusyRitusError, IndexError):
    """Level index outside the available bound-state range."""
