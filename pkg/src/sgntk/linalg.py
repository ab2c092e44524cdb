"""Dense symmetric linear algebra used by the kernel and regression modules.

Matrices are plain numpy arrays (row-major).  The routines here wrap
numpy/scipy factorizations and add the error semantics and jitter policy the
rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NonFinite,
    NotPositiveDefinite,
    PreconditionViolated,
)

# Additive jitter ladder for Cholesky on nearly singular Gram matrices:
# 0, then 1e-12 * tr(A)/n escalating tenfold up to 1e-6 * tr(A)/n.
_JITTER_FLOOR = 1e-12
_JITTER_CEIL = 1e-6

_SYM_RTOL = 1e-10


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    ``eigenvalues`` ascend, and the columns of ``eigenvectors`` are the
    matching orthonormal eigenvectors, so that Q @ diag(w) @ Q.T rebuilds the
    input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def _check_symmetric(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    scale = max(float(np.abs(a).max(initial=0.0)), 1e-300)
    if float(np.abs(a - a.T).max(initial=0.0)) > _SYM_RTOL * scale:
        raise PreconditionViolated(f"{name} is not symmetric within {_SYM_RTOL:g} relative")
    # Symmetrize exactly so downstream factorizations see a clean input.
    return 0.5 * (a + a.T)


def jitter_ladder(a: np.ndarray) -> list[float]:
    """Additive diagonal jitters to try, in order, for a Gram-like matrix."""
    n = a.shape[0]
    base = abs(float(np.trace(a))) / n if n else 0.0
    if base == 0.0:
        base = 1.0
    ladder = [0.0]
    jit = _JITTER_FLOOR
    while jit <= _JITTER_CEIL * (1 + 1e-12):
        ladder.append(jit * base)
        jit *= 10.0
    return ladder


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A X = B for symmetric positive definite A via Cholesky.

    Escalates through the additive jitter ladder when A is numerically
    singular; raises NotPositiveDefinite once the ladder is exhausted.
    """
    a = _check_symmetric(_as_square(a, "A"), "A")
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"B has {b.shape[0]} rows, expected {a.shape[0]}")
    eye = np.eye(a.shape[0])
    for jit in jitter_ladder(a):
        try:
            factor = scipy.linalg.cho_factor(a + jit * eye, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        return scipy.linalg.cho_solve(factor, b, check_finite=False)
    raise NotPositiveDefinite(
        f"Cholesky failed for {a.shape[0]}x{a.shape[0]} matrix even with jitter"
    )


def solve_general(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A X = B for a general (possibly asymmetric) square A.

    Uses LU with partial pivoting; intended for asymmetric kernel Grams where
    forming normal equations would square the condition number.
    """
    a = _as_square(a, "A")
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"B has {b.shape[0]} rows, expected {a.shape[0]}")
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"LU solve failed: {exc}") from exc


def eig_sym(a: np.ndarray) -> SymEig:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    a = _check_symmetric(_as_square(a), "matrix")
    try:
        w, q = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"symmetric eigensolver failed: {exc}") from exc
    return SymEig(eigenvalues=w, eigenvectors=q)


def matrix_exp(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Compute exp(t * A) for a square matrix A.

    Symmetric inputs go through the eigendecomposition; general inputs use
    scaling-and-squaring.  Overflow is reported as NonFinite rather than
    returned as inf entries.
    """
    a = _as_square(a)
    if not np.all(np.isfinite(a)) or not np.isfinite(t):
        raise NonFinite("matrix_exp requires finite entries and finite t")
    m = t * a
    scale = max(float(np.abs(m).max(initial=0.0)), 1e-300)
    if float(np.abs(m - m.T).max(initial=0.0)) <= _SYM_RTOL * scale:
        ee = eig_sym(m)
        with np.errstate(over="raise"):
            try:
                grown = np.exp(ee.eigenvalues)
            except FloatingPointError as exc:
                raise NonFinite("matrix_exp overflow in eigenvalue exponentials") from exc
        result = (ee.eigenvectors * grown) @ ee.eigenvectors.T
    else:
        result = scipy.linalg.expm(m)
    if not np.all(np.isfinite(result)):
        raise NonFinite("matrix_exp produced non-finite entries")
    return result
