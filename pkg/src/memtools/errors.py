"""Exception types shared across the toolbox."""


class MemError(Exception):
    """Base class for all toolbox errors."""


class DomainError(MemError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class RootFailure(MemError, RuntimeError):
    """A scalar root could not be certified."""


class NoSignChange(RootFailure):
    """Bracketing failed to find a sign change."""


class MaxIterations(RootFailure):
    """An iterative scalar solver ran out of iterations."""


class BracketFailure(RootFailure):
    """A numeric conjugate could not bracket its maximizer inside the natural domain."""


class NonConvergence(MemError, RuntimeError):
    """An iterative linear-algebra routine did not converge."""


class Unsupported(MemError, NotImplementedError):
    """The requested combination is not available."""


class StepSizeError(MemError, ValueError):
    """Primal-dual step sizes violate the convergence condition."""


class ConfigError(MemError, ValueError):
    """A run configuration could not be parsed."""
