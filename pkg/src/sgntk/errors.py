"""Exception types shared across the package.

Every error raised deliberately by this package derives from ``SgntkError``,
so callers can catch the whole family with one clause.
"""


class SgntkError(Exception):
    """Base class for all package-specific errors."""


class NotPositiveDefinite(SgntkError):
    """A matrix required to be positive definite failed Cholesky even after jitter."""


class NoConvergence(SgntkError):
    """An iterative routine hit its iteration cap without converging."""


class NonFinite(SgntkError):
    """A computation produced inf or nan where a finite value is required."""


class InvalidScale(SgntkError):
    """A scale parameter (activation slope, kappa, width) is out of range."""


class DimensionMismatch(SgntkError):
    """Array shapes are incompatible with the requested operation."""


class InvalidCov(SgntkError):
    """A 2x2 covariance is not symmetric positive semi-definite within tolerance."""


class ZeroDiagonal(SgntkError):
    """A kernel diagonal entry vanished where a positive value is required."""


class NonParallelRequired(SgntkError):
    """Sign-limit kernels need a positive bias variance or non-parallel inputs."""


class MissingSurrogate(SgntkError):
    """An operation needing a surrogate derivative was called without one."""


class NonFiniteLoss(SgntkError):
    """Training loss became non-finite or exceeded the divergence guard."""


class DivergentKernel(SgntkError):
    """A Gram matrix contains divergent entries and cannot be used numerically."""


class SingularGram(SgntkError):
    """A kernel Gram matrix is singular beyond what jitter may repair."""


class PreconditionViolated(SgntkError):
    """A documented operation precondition does not hold for the given inputs."""


class SchemaMismatch(SgntkError):
    """A data file does not match its declared column schema."""
