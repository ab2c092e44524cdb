"""Bivariate-Gaussian expectations E[g1(Z1) g2(Z2)].

Three routes are provided and cross-checked against each other in the tests:
closed forms for erf/erf-derivative pairs, tensor-product Gauss-Hermite
quadrature for arbitrary bounded integrands, and a Monte-Carlo estimator used
as an oracle.  The closed forms:

    t_erf(c)      = (2/pi) arcsin(2 s12 / sqrt((1+2 s11)(1+2 s22)))
    tdot_erf(c)   = (4/pi) det(I + 2 c)^(-1/2)
    t_erf_m(c, m)    = t_erf(m^2 c)
    tdot_erf_m(c, m) = (2/pi) det(c + I/(2 m^2))^(-1/2)

The m-scaled derivative form stays finite for singular c, where it grows
linearly in m on the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidCov, InvalidScale, PreconditionViolated
from .rng import substream

_DET_SLACK = 1e-12
_ASIN_SLACK = 1e-9
_RHO_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class Cov2:
    """A 2x2 covariance [[s11, s12], [s12, s22]], validated at construction."""

    s11: float
    s22: float
    s12: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.s11, self.s22, self.s12)):
            raise InvalidCov(f"covariance entries must be finite: {self}")
        if self.s11 < 0 or self.s22 < 0:
            raise InvalidCov(f"negative variance in {self}")
        scale = max(self.s11 * self.s22, self.s12 * self.s12, 1.0)
        if self.raw_det < -_DET_SLACK * scale:
            raise InvalidCov(f"determinant {self.raw_det:g} below roundoff slack in {self}")

    @property
    def raw_det(self) -> float:
        return self.s11 * self.s22 - self.s12 * self.s12

    @property
    def det(self) -> float:
        """Determinant clamped to zero when roundoff makes it slightly negative."""
        return max(self.raw_det, 0.0)

    @property
    def invertible(self) -> bool:
        scale = max(self.s11 * self.s22, self.s12 * self.s12, 1.0)
        return self.raw_det > _DET_SLACK * scale

    def scaled(self, factor: float) -> "Cov2":
        return Cov2(self.s11 * factor, self.s22 * factor, self.s12 * factor)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.s11, self.s12], [self.s12, self.s22]])


def _clamped_asin(arg: float) -> float:
    if abs(arg) > 1.0 + _ASIN_SLACK:
        raise InvalidCov(f"arcsin argument {arg:.17g} beyond clamp tolerance")
    return math.asin(max(-1.0, min(1.0, arg)))


def t_erf(c: Cov2) -> float:
    """E[erf(Z1) erf(Z2)] under the bivariate normal with covariance c."""
    arg = 2.0 * c.s12 / math.sqrt((1.0 + 2.0 * c.s11) * (1.0 + 2.0 * c.s22))
    return (2.0 / math.pi) * _clamped_asin(arg)


def tdot_erf(c: Cov2) -> float:
    """E[erf'(Z1) erf'(Z2)] under the bivariate normal with covariance c."""
    det = (1.0 + 2.0 * c.s11) * (1.0 + 2.0 * c.s22) - 4.0 * c.s12 * c.s12
    if det <= 0:
        raise InvalidCov(f"shifted determinant {det:g} not positive for {c}")
    return (4.0 / math.pi) / math.sqrt(det)


def _check_slope(m: float) -> float:
    if not (m > 0) or not math.isfinite(m):
        raise InvalidScale(f"slope m must be positive and finite, got {m}")
    return float(m)


def t_erf_m(c: Cov2, m: float) -> float:
    """E[erf(m Z1) erf(m Z2)]: the erf form on the m^2-scaled covariance."""
    return t_erf(c.scaled(_check_slope(m) ** 2))


def tdot_erf_m(c: Cov2, m: float) -> float:
    """E[erf_m'(Z1) erf_m'(Z2)] with erf_m'(z) = (2m/sqrt(pi)) exp(-(m z)^2).

    Finite for singular c; on the diagonal (s11 = s22 = s12 = s) it equals
    (2/pi) m (s + 1/(4 m^2))^(-1/2), growing linearly in m.
    """
    a = 1.0 / (2.0 * _check_slope(m) ** 2)
    det = (c.s11 + a) * (c.s22 + a) - c.s12 * c.s12
    if det <= 0:
        raise InvalidCov(f"shifted determinant {det:g} not positive for {c}")
    return (2.0 / math.pi) / math.sqrt(det)


def t_erf_mm(c: Cov2, m1: float, m2: float) -> float:
    """E[erf(m1 Z1) erf(m2 Z2)], allowing different slopes per slot."""
    m1, m2 = _check_slope(m1), _check_slope(m2)
    arg = (
        2.0
        * m1
        * m2
        * c.s12
        / math.sqrt((1.0 + 2.0 * m1 * m1 * c.s11) * (1.0 + 2.0 * m2 * m2 * c.s22))
    )
    return (2.0 / math.pi) * _clamped_asin(arg)


def tdot_erf_mm(c: Cov2, m1: float, m2: float) -> float:
    """E[erf_m1'(Z1) erf_m2'(Z2)], allowing different slopes per slot."""
    m1, m2 = _check_slope(m1), _check_slope(m2)
    det = (1.0 + 2.0 * m1 * m1 * c.s11) * (1.0 + 2.0 * m2 * m2 * c.s22) - (
        2.0 * m1 * m2 * c.s12
    ) ** 2
    if det <= 0:
        raise InvalidCov(f"shifted determinant {det:g} not positive for {c}")
    return m1 * m2 * (4.0 / math.pi) / math.sqrt(det)


def mean_erf_deriv(variance: float) -> float:
    """E[erf'(Y)] for Y ~ N(0, variance): (2/sqrt(pi)) (1 + 2 variance)^(-1/2)."""
    if variance < 0:
        raise InvalidCov(f"variance must be nonnegative, got {variance}")
    return 2.0 / math.sqrt(math.pi) / math.sqrt(1.0 + 2.0 * variance)


def gauss_expect_1d(g, variance: float, order: int = 64) -> float:
    """E[g(Y)] for Y ~ N(0, variance) by one-dimensional Gauss-Hermite."""
    if variance < 0:
        raise InvalidCov(f"variance must be nonnegative, got {variance}")
    nodes, weights = _hermgauss(int(order))
    ys = math.sqrt(2.0 * variance) * nodes
    return float(np.dot(weights, np.asarray(g(ys), dtype=float)) / math.sqrt(math.pi))


def steep_pair_expect(c: Cov2, m: float, g2, order: int = 64) -> float:
    """E[erf_m'(Z1) g2(Z2)] with the steep slot integrated analytically.

    erf_m'(z) = (2m/sqrt(pi)) exp(-(m z)^2) is 2x a normal density with
    variance 1/(2 m^2), so the Z1 integral collapses by Gaussian algebra and
    only E[g2(Y)] over a derived one-dimensional normal remains.  This stays
    accurate for arbitrarily large m, where tensor quadrature cannot resolve
    the near-delta slot, and converges to sqrt(2/pi) s11^(-1/2) E[g2] in the
    m -> infinity limit.
    """
    m = _check_slope(m)
    v_m = 1.0 / (2.0 * m * m)
    denom = c.s11 + v_m
    if c.s11 > 0:
        beta = c.s12 / c.s11
        v_prime = v_m * c.s11 / denom
        var_y = beta * beta * v_prime + c.det / c.s11
    else:
        var_y = c.s22
    front = 2.0 / math.sqrt(2.0 * math.pi * denom)
    return front * gauss_expect_1d(g2, var_y, order)


@lru_cache(maxsize=32)
def _hermgauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    return nodes, weights


def _cholesky_factors(c: Cov2) -> tuple[float, float, float]:
    """Lower-triangular factors (l11, l21, l22) of c with correlation clamp."""
    if c.s11 > 0 and c.s22 > 0:
        rho = c.s12 / math.sqrt(c.s11 * c.s22)
        rho = math.copysign(min(abs(rho), _RHO_CLAMP), rho)
    else:
        rho = 0.0
    l11 = math.sqrt(c.s11)
    l21 = math.sqrt(c.s22) * rho
    l22 = math.sqrt(c.s22) * math.sqrt(1.0 - rho * rho)
    return l11, l21, l22


def gh_expect(c: Cov2, g1, g2, order: int = 64) -> float:
    """Tensor-product Gauss-Hermite estimate of E[g1(Z1) g2(Z2)].

    The integrands must accept numpy arrays.  Accuracy improves with the
    order Q for bounded Lipschitz integrands; Q is restricted to [8, 256].
    """
    if not 8 <= int(order) <= 256:
        raise PreconditionViolated(f"quadrature order {order} outside [8, 256]")
    nodes, weights = _hermgauss(int(order))
    l11, l21, l22 = _cholesky_factors(c)
    root2 = math.sqrt(2.0)
    z1 = root2 * l11 * nodes  # depends on the first axis only
    u = nodes[:, None]
    v = nodes[None, :]
    z2 = root2 * (l21 * u + l22 * v)
    vals1 = np.asarray(g1(z1), dtype=float)[:, None]
    vals2 = np.asarray(g2(z2), dtype=float)
    return float(np.einsum("i,j,ij->", weights, weights, vals1 * vals2) / math.pi)


def mc_expect(c: Cov2, g1, g2, samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of E[g1(Z1) g2(Z2)] with its standard error."""
    if samples < 2:
        raise PreconditionViolated(f"need at least 2 samples, got {samples}")
    gen = substream(seed, "mc-expect")
    l11, l21, l22 = _cholesky_factors(c)
    xi = gen.standard_normal((2, int(samples)))
    z1 = l11 * xi[0]
    z2 = l21 * xi[0] + l22 * xi[1]
    vals = np.asarray(g1(z1), dtype=float) * np.asarray(g2(z2), dtype=float)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))
