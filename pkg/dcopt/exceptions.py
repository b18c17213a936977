"""Exceptions raised by dcopt. Each derives from the closest builtin."""
import dcopt

export, __all__ = dcopt.exporter()


@export
class ConnectivityFailure(RuntimeError):
    """No connected graph could be drawn or an accepted graph is disconnected"""


@export
class SpectralFailure(RuntimeError):
    """Eigenvalue computation failed or is not accurate enough"""


@export
class DimensionMismatch(ValueError):
    """Agent states, matrices or problems have incompatible shapes"""


@export
class NonPSD(ValueError):
    """A matrix that should be positive semi-definite is not"""


@export
class ParseError(ValueError):
    """Malformed line in a libsvm file"""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)
        self.line_number = line_number


@export
class EmptyDataset(ValueError):
    """A dataset (or one agent's share of it) has no samples"""


@export
class RegimeMismatch(ValueError):
    """The problem does not satisfy the assumptions of the requested regime"""


@export
class NonFiniteState(FloatingPointError):
    """The iterates contain NaN or Inf, usually due to a too large step size.

    ``metrics`` holds the records collected before the failure and ``t`` the
    iteration at which it was detected.
    """

    def __init__(self, message, t=None, metrics=None):
        super().__init__(message)
        self.t = t
        self.metrics = [] if metrics is None else list(metrics)


@export
class NoConvergence(RuntimeError):
    """The reference solver hit its iteration cap before reaching tol"""

    def __init__(self, message, residual=None, x=None):
        super().__init__(message)
        self.residual = residual
        self.x = x


@export
class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration"""
