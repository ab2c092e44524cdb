"""Infinite-width predictions: GP posteriors and the steep-kernel classifier.

Linearized training dynamics with a constant kernel K have the closed-form
solution at test points T

    mean_t = K(T,X) K^{-1} (I - exp(-eta K t)) Y,

and, with Sigma the initial-function covariance, the covariance

    cov_t = Sig(T,T) - Sig(T,X) (I - E) K^{-1} K(X,T)
                    - K(T,X) K^{-1} (I - E) Sig(X,T)
                    + K(T,X) K^{-1} (I - E) Sig(X,X) (I - E) K^{-1} K(X,T)

with E = exp(-eta K t).  At t = infinity the exponential factors vanish and
the same formulas hold for an asymmetric generalized kernel with the inverse
taken by an LU solve.  The finite-t route is restricted to symmetric kernels,
where everything diagonalizes in one eigenbasis.

The steep-slope tangent kernel diverges on the diagonal, so instead of a GP
it yields a classifier: the divergent self-term dominates at data points and
elsewhere the sign of the finite cross-kernel sum decides.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .analytic_kernels import (
    KIND_NNGP,
    KIND_NTK,
    KIND_SG_NTK,
    MODE_SIGN,
    KernelSpec,
    kernel_matrix,
)
from .errors import InvalidScale, PreconditionViolated, SingularGram
from .linalg import SymEig, eig_sym, jitter_ladder
from .training import _as_xy

_DYNAMICS_KINDS = {KIND_NTK, KIND_SG_NTK, KIND_NNGP}
_PARALLEL_TOL = 1e-12
_SPHERE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class GPPosterior:
    """Posterior state: kernel specs, training data, Gram and factorization.

    Immutable after construction; queries only read.  ``t`` is the training
    time (``math.inf`` for the fully trained limit), and ``kernel_scale``
    multiplies every dynamics-kernel value (a diagnostic knob; the t=infinity
    mean must not depend on it).
    """

    spec: KernelSpec
    cov_spec: KernelSpec
    train_x: np.ndarray
    train_y: np.ndarray
    t: float
    eta: float
    kernel_scale: float
    gram: np.ndarray
    cov_gram: np.ndarray
    symmetric: bool
    factorization: SymEig | tuple


def _sym_factor(gram: np.ndarray) -> SymEig:
    ee = eig_sym(gram)
    lam, q = ee.eigenvalues, ee.eigenvectors
    top = float(lam[-1])
    for jit in jitter_ladder(gram):
        shifted = lam + jit
        if shifted[0] > 0 and shifted[0] >= 1e-14 * max(top + jit, 1e-300):
            return SymEig(eigenvalues=shifted, eigenvectors=q)
    raise SingularGram(
        f"{gram.shape[0]}x{gram.shape[0]} kernel Gram stayed singular through the jitter ladder"
    )


def _lu_factor(gram: np.ndarray) -> tuple:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(gram, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = max(float(np.abs(gram).max(initial=0.0)), 1e-300)
    if not np.all(pivots > np.finfo(float).eps * gram.shape[0] * scale):
        raise SingularGram(
            f"{gram.shape[0]}x{gram.shape[0]} kernel Gram is singular to working precision"
        )
    return lu, piv


def gp_posterior(spec: KernelSpec, data, t: float = math.inf, eta: float = 1.0,
                 kernel_scale: float = 1.0) -> GPPosterior:
    """Build the posterior for one dynamics kernel over a training set.

    ``spec`` drives the training dynamics; the matching initial-function
    covariance is the plain covariance kernel with the same activation stack.
    Finite ``t`` requires a symmetric dynamics kernel.
    """
    if spec.kind not in _DYNAMICS_KINDS:
        raise PreconditionViolated(
            f"dynamics kernel must be one of {sorted(_DYNAMICS_KINDS)}, got {spec.kind!r}"
        )
    if t is None:
        t = math.inf
    if not (t >= 0):
        raise InvalidScale(f"training time must be >= 0, got {t}")
    if not (eta > 0):
        raise InvalidScale(f"eta must be positive, got {eta}")
    if not (kernel_scale > 0):
        raise InvalidScale(f"kernel_scale must be positive, got {kernel_scale}")
    xs, ys = _as_xy(data)
    gram = kernel_matrix(spec, xs).require_finite() * kernel_scale
    symmetric = spec.kind in (KIND_NTK, KIND_NNGP) and spec.activation2 is None
    if 0 < t < math.inf and not symmetric:
        raise PreconditionViolated(
            "finite-time posterior needs a symmetric dynamics kernel; "
            "generalized kernels support t=0 and t=inf only"
        )
    factorization = _sym_factor(gram) if symmetric else _lu_factor(gram)
    cov_spec = replace(spec, kind=KIND_NNGP, surrogate1=None, surrogate2=None)
    cov_gram = kernel_matrix(cov_spec, xs).require_finite()
    return GPPosterior(
        spec=spec,
        cov_spec=cov_spec,
        train_x=xs,
        train_y=ys,
        t=float(t),
        eta=float(eta),
        kernel_scale=float(kernel_scale),
        gram=gram,
        cov_gram=cov_gram,
        symmetric=symmetric,
        factorization=factorization,
    )


def _progress_apply(gp: GPPosterior, mat: np.ndarray) -> np.ndarray:
    """K^{-1} (I - exp(-eta K t)) @ mat in the cached eigenbasis."""
    lam, q = gp.factorization.eigenvalues, gp.factorization.eigenvectors
    tau = gp.eta * gp.t
    if math.isinf(tau):
        coef = 1.0 / lam
    else:
        coef = -np.expm1(-lam * tau) / lam
    return q @ (coef[:, None] * (q.T @ mat))


def _inv_transpose_apply(gp: GPPosterior, mat: np.ndarray) -> np.ndarray:
    """K^{-T} @ mat for the asymmetric route."""
    return scipy.linalg.lu_solve(gp.factorization, mat, trans=1, check_finite=False)


def _influence(gp: GPPosterior, k_tx: np.ndarray) -> np.ndarray:
    """The matrix A with mean = A Y: K(T,X) K^{-1} (I - exp(-eta K t))."""
    if gp.symmetric:
        return _progress_apply(gp, k_tx.T).T
    return _inv_transpose_apply(gp, k_tx.T).T


def _query_points(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    return np.atleast_2d(arr), single


def posterior_mean(gp: GPPosterior, x) -> np.ndarray:
    """Mean prediction at one point (vector) or a stack of points (matrix)."""
    pts, single = _query_points(x)
    if gp.t == 0:
        out = np.zeros((pts.shape[0], gp.train_y.shape[1]))
    else:
        k_tx = kernel_matrix(gp.spec, pts, gp.train_x).require_finite() * gp.kernel_scale
        out = _influence(gp, k_tx) @ gp.train_y
    return out[0] if single else out


def posterior_cov(gp: GPPosterior, x_list) -> np.ndarray:
    """Posterior covariance over a set of test points, per output coordinate.

    Output coordinates are independent with identical covariance, so the
    result is a single (T, T) matrix.
    """
    pts, _ = _query_points(x_list)
    sig_tt = kernel_matrix(gp.cov_spec, pts).require_finite()
    if gp.t == 0:
        return sig_tt
    sig_tx = kernel_matrix(gp.cov_spec, pts, gp.train_x).require_finite()
    k_tx = kernel_matrix(gp.spec, pts, gp.train_x).require_finite() * gp.kernel_scale
    a = _influence(gp, k_tx)
    return sig_tt - sig_tx @ a.T - a @ sig_tx.T + a @ gp.cov_gram @ a.T


def posterior_std(gp: GPPosterior, x_list) -> np.ndarray:
    """Pointwise posterior standard deviations (clipped at zero)."""
    cov = posterior_cov(gp, x_list)
    return np.sqrt(np.clip(np.diag(cov), 0.0, None))


def _common_sphere_radius(points: np.ndarray, extra: np.ndarray | None = None) -> float:
    norms = np.linalg.norm(points, axis=1)
    radius = float(norms[0])
    tol = _SPHERE_RTOL * max(radius, 1.0)
    if np.any(np.abs(norms - radius) > tol):
        raise PreconditionViolated("training inputs must lie on a common sphere")
    if extra is not None and abs(float(np.linalg.norm(extra)) - radius) > tol:
        raise PreconditionViolated("query point must lie on the training sphere")
    return radius


def _parallel(a: np.ndarray, b: np.ndarray) -> bool:
    return abs(float(np.dot(a, b))) >= (1 - _PARALLEL_TOL) * np.linalg.norm(a) * np.linalg.norm(b)


def nw_classify(spec: KernelSpec, data, x, kernel_scale: float = 1.0):
    """Classify with the steep-limit tangent kernel: sign of K(x,X) @ Y.

    At a point equal to a training input the divergent self-term dominates,
    so the stored label is returned.  An exact zero score is surfaced as 0.
    ``kernel_scale`` multiplies every kernel value; any positive value must
    leave the classification unchanged.
    """
    if not (kernel_scale > 0):
        raise InvalidScale(f"kernel_scale must be positive, got {kernel_scale}")
    if spec.kind != KIND_NTK or spec.mode != MODE_SIGN:
        raise PreconditionViolated(
            "classification needs the steep-limit tangent kernel"
        )
    xs, ys = _as_xy(data)
    if not np.all(np.abs(ys) == 1.0):
        raise PreconditionViolated("labels must be exactly -1 or +1")
    query = np.asarray(x, dtype=float).ravel()
    _common_sphere_radius(xs, query)
    if spec.sigma_b == 0.0:
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                if _parallel(xs[i], xs[j]):
                    raise PreconditionViolated(
                        "with sigma_b = 0 the training inputs must be pairwise non-parallel"
                    )
    for i in range(len(xs)):
        if np.array_equal(query, xs[i]):
            labels = ys[i].astype(int)
            return int(labels[0]) if labels.size == 1 else labels
    if spec.sigma_b == 0.0 and any(_parallel(query, xi) for xi in xs):
        raise PreconditionViolated(
            "with sigma_b = 0 the query must be non-parallel to every training input"
        )
    row = kernel_scale * kernel_matrix(spec, query[None, :], xs).require_finite()[0]
    score = row @ ys
    out = np.sign(score).astype(int)
    return int(out[0]) if out.size == 1 else out


def gram_spectrum(spec: KernelSpec, points) -> tuple[float, float]:
    """Smallest and largest eigenvalue of the symmetrized kernel Gram."""
    gram = kernel_matrix(spec, points).require_finite()
    ee = eig_sym(0.5 * (gram + gram.T))
    return float(ee.eigenvalues[0]), float(ee.eigenvalues[-1])


def eta_critical(lambda_min: float, lambda_max: float) -> float:
    """Learning-rate threshold 2 (lambda_min + lambda_max) of the Gram."""
    return 2.0 * (lambda_min + lambda_max)


def check_learning_rate(eta: float, spec: KernelSpec, points) -> float:
    """Warn (never raise) when eta reaches the critical threshold."""
    lo, hi = gram_spectrum(spec, points)
    threshold = eta_critical(lo, hi)
    if eta >= threshold:
        warnings.warn(
            f"eta = {eta:g} is at or above the critical rate {threshold:.6g}; "
            "training may not converge",
            RuntimeWarning,
            stacklevel=2,
        )
    return threshold
