"""Infinite-width kernels of deep networks: covariance, tangent and
surrogate-gradient variants, for finite activation slopes and in the
steep-slope (step-activation) limit.

All kernels are driven by one layer recursion over the triple
(S(x,x), S(y,y), S(x,y)) of covariance values, starting from

    S1(u, v) = sigma_w^2 / n0 <u, v> + sigma_b^2.

On top of the covariance levels sit:

  * the derivative factor  Sdot(l) = sigma_w^2 E[act'(Z1) act'(Z2)],
  * the tangent recursion  T(1) = S1,  T(l) = S(l) + T(l-1) Sdot(l),
  * the surrogate factor   Stil(l) = sigma_w^2 E[slot1(Z1) slot2(Z2)],
  * the generalized recursion  I(1) = S1,  I(l) = S(l) + I(l-1) Stil(l),

with (Z1, Z2) centered bivariate normal with the level-(l-1) triple as
covariance.  In the steep-slope limit the covariance recursion becomes an
arcsine map, Sdot acquires a determinant singularity on the diagonal (the
tangent kernel diverges there), while the surrogate factor stays finite
everywhere because the steep slot collapses onto a Gaussian point mass that
regularizes the expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .activations import ActivationSpec, SurrogateSpec
from .dual_expectations import (
    Cov2,
    gauss_expect_1d,
    gh_expect,
    mean_erf_deriv,
    steep_pair_expect,
    t_erf_m,
    t_erf_mm,
    tdot_erf_mm,
)
from .errors import (
    DimensionMismatch,
    DivergentKernel,
    InvalidScale,
    MissingSurrogate,
    NonParallelRequired,
    PreconditionViolated,
    ZeroDiagonal,
)

KIND_NNGP = "nngp"
KIND_NNGP_DOT = "nngp-dot"
KIND_NTK = "ntk"
KIND_CROSS_NNGP = "cross-nngp"
KIND_SURROGATE_SIGMA = "surrogate-sigma"
KIND_SG_NTK = "sg-ntk"
_KINDS = {KIND_NNGP, KIND_NNGP_DOT, KIND_NTK, KIND_CROSS_NNGP, KIND_SURROGATE_SIGMA, KIND_SG_NTK}

MODE_CLOSED = "closed_form"
MODE_QUAD = "quadrature"
MODE_SIGN = "sign_limit"
_MODES = {MODE_CLOSED, MODE_QUAD, MODE_SIGN}

_PARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class Divergent:
    """Marker for entries that grow without bound in the steep-slope limit.

    Where the asymptotic is known the value behaves like rate * m**power as
    the slope m grows.
    """

    rate: float | None = None
    power: int | None = None


def is_divergent(value) -> bool:
    return isinstance(value, Divergent)


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel to evaluate, at what depth, with which scalar maps."""

    kind: str
    depth: int
    sigma_w: float
    sigma_b: float
    activation1: ActivationSpec
    activation2: ActivationSpec | None = None
    surrogate1: SurrogateSpec | None = None
    surrogate2: SurrogateSpec | None = None
    mode: str = MODE_CLOSED
    quad_order: int = 64

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.mode not in _MODES:
            raise ValueError(f"unknown kernel mode {self.mode!r}")
        if self.depth < 1:
            raise InvalidScale(f"depth must be >= 1, got {self.depth}")
        if not (self.sigma_w > 0):
            raise InvalidScale(f"sigma_w must be positive, got {self.sigma_w}")
        if self.sigma_b < 0:
            raise InvalidScale(f"sigma_b must be nonnegative, got {self.sigma_b}")
        acts = [self.activation1] + ([self.activation2] if self.activation2 else [])
        if self.mode == MODE_CLOSED and any(a.slope is None for a in acts):
            raise PreconditionViolated("closed-form mode needs erf-family activations")
        if self.mode == MODE_SIGN and any(a.name != "sign" for a in acts):
            raise PreconditionViolated("sign-limit mode needs the step activation")
        if self.kind == KIND_CROSS_NNGP and self.activation2 is None:
            raise PreconditionViolated("cross covariance needs a second activation")
        if self.kind in (KIND_SURROGATE_SIGMA, KIND_SG_NTK):
            if self.surrogate1 is None and self.surrogate2 is None:
                raise MissingSurrogate(
                    "surrogate kernels need a surrogate in at least one slot"
                )

    def second_activation(self) -> ActivationSpec:
        return self.activation2 if self.activation2 is not None else self.activation1


def _as_input(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"{name} must be a flat vector, got shape {x.shape}")
    return x


def _pair(spec: KernelSpec, x, y) -> tuple[np.ndarray, np.ndarray, bool]:
    x, y = _as_input(x, "x"), _as_input(y, "y")
    if x.size != y.size:
        raise DimensionMismatch(f"inputs differ in dimension: {x.size} vs {y.size}")
    diagonal = bool(np.array_equal(x, y))
    if spec.mode == MODE_SIGN and spec.sigma_b == 0.0:
        nx, ny = np.linalg.norm(x), np.linalg.norm(y)
        if nx == 0.0 or ny == 0.0:
            raise ZeroDiagonal("steep-slope kernels need nonzero inputs when sigma_b = 0")
        if not diagonal and abs(float(np.dot(x, y))) >= (1 - _PARALLEL_TOL) * nx * ny:
            raise NonParallelRequired(
                "steep-slope kernels need sigma_b > 0 or non-parallel distinct inputs"
            )
    return x, y, diagonal


def _base_triple(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    n0 = x.size
    sw2, sb2 = spec.sigma_w**2, spec.sigma_b**2
    return (
        sw2 / n0 * float(np.dot(x, x)) + sb2,
        sw2 / n0 * float(np.dot(y, y)) + sb2,
        sw2 / n0 * float(np.dot(x, y)) + sb2,
    )


def _clamped_ratio(sxy: float, sxx: float, syy: float) -> float:
    if sxx <= 0.0 or syy <= 0.0:
        raise ZeroDiagonal("covariance diagonal vanished in the arcsine recursion")
    return sxy / math.sqrt(sxx * syy)


def _next_triple(spec: KernelSpec, triple: tuple[float, float, float]) -> tuple[float, float, float]:
    sxx, syy, sxy = triple
    sw2, sb2 = spec.sigma_w**2, spec.sigma_b**2
    act1, act2 = spec.activation1, spec.second_activation()
    if spec.mode == MODE_SIGN:
        ratio = _clamped_ratio(sxy, sxx, syy)
        ratio = max(-1.0, min(1.0, ratio))
        nxy = (2.0 * sw2 / math.pi) * math.asin(ratio) + sb2
        return (sw2 + sb2, sw2 + sb2, nxy)
    if spec.mode == MODE_CLOSED:
        m1, m2 = act1.slope, act2.slope
        nxx = sw2 * t_erf_m(Cov2(sxx, sxx, sxx), m1) + sb2
        nyy = sw2 * t_erf_m(Cov2(syy, syy, syy), m2) + sb2
        nxy = sw2 * t_erf_mm(Cov2(sxx, syy, sxy), m1, m2) + sb2
        return (nxx, nyy, nxy)
    order = spec.quad_order
    nxx = sw2 * gh_expect(Cov2(sxx, sxx, sxx), act1.fn, act1.fn, order) + sb2
    nyy = sw2 * gh_expect(Cov2(syy, syy, syy), act2.fn, act2.fn, order) + sb2
    nxy = sw2 * gh_expect(Cov2(sxx, syy, sxy), act1.fn, act2.fn, order) + sb2
    return (nxx, nyy, nxy)


def _triples(spec: KernelSpec, levels: int, x: np.ndarray, y: np.ndarray) -> list:
    triple = _base_triple(spec, x, y)
    out = [triple]
    for _ in range(levels - 1):
        triple = _next_triple(spec, triple)
        out.append(triple)
    return out


def _deriv_map(act: ActivationSpec):
    if not act.has_derivative:
        raise MissingSurrogate(
            f"activation {act.name!r} has no derivative outside the steep-slope limit"
        )
    return act.deriv


def _dot_level(spec: KernelSpec, prev: tuple[float, float, float], diagonal: bool):
    """Derivative factor at one level given the previous level's triple."""
    sxx, syy, sxy = prev
    sw2 = spec.sigma_w**2
    if spec.mode == MODE_SIGN:
        if diagonal:
            return Divergent(rate=(2.0 * sw2 / math.pi) / math.sqrt(sxx), power=1)
        det = Cov2(sxx, syy, sxy).det
        if det <= 0.0:
            raise NonParallelRequired(
                "derivative factor degenerates for perfectly correlated inputs"
            )
        return (2.0 * sw2 / math.pi) / math.sqrt(det)
    if spec.mode == MODE_CLOSED:
        return sw2 * tdot_erf_mm(
            Cov2(sxx, syy, sxy), spec.activation1.slope, spec.second_activation().slope
        )
    d1 = _deriv_map(spec.activation1)
    d2 = _deriv_map(spec.second_activation())
    return sw2 * gh_expect(Cov2(sxx, syy, sxy), d1, d2, spec.quad_order)


def _surrogate_level(spec: KernelSpec, prev: tuple[float, float, float], diagonal: bool) -> float:
    """Surrogate factor at one level given the previous level's triple.

    Slot 1 defaults to the first activation's true derivative, slot 2 to the
    second's; a SurrogateSpec in surrogate1/surrogate2 replaces the
    corresponding slot with a bounded map.
    """
    sxx, syy, sxy = prev
    sw2 = spec.sigma_w**2
    order = spec.quad_order
    sur1, sur2 = spec.surrogate1, spec.surrogate2
    c = Cov2(sxx, syy, sxy)

    if sur1 is not None and sur2 is not None:
        return sw2 * gh_expect(c, sur1.fn, sur2.fn, order)

    if spec.mode == MODE_SIGN:
        # One slot is the steep-slope derivative: a point mass that leaves a
        # one-dimensional expectation over the other (bounded) slot.
        if sur1 is None:
            sur, s_norm = sur2, sxx
        else:
            sur, s_norm = sur1, syy
        if s_norm <= 0.0:
            raise ZeroDiagonal("surrogate factor needs a positive diagonal")
        if diagonal:
            expect = float(np.asarray(sur.fn(0.0), dtype=float))
        elif sur.name == "derf":
            expect = mean_erf_deriv(c.det / s_norm)
        else:
            expect = gauss_expect_1d(sur.fn, c.det / s_norm, order)
        return sw2 * math.sqrt(2.0 / math.pi) / math.sqrt(s_norm) * expect

    # Finite slope: integrate the erf-derivative slot analytically so steep
    # slopes never meet the quadrature grid.
    if sur1 is None:
        act = spec.activation1
        if act.slope is not None:
            if sur2.name == "derf":
                return sw2 * tdot_erf_mm(c, act.slope, 1.0)
            return sw2 * steep_pair_expect(c, act.slope, sur2.fn, order)
        return sw2 * gh_expect(c, _deriv_map(act), sur2.fn, order)
    act = spec.second_activation()
    if act.slope is not None:
        if sur1.name == "derf":
            return sw2 * tdot_erf_mm(c, 1.0, act.slope)
        mirrored = Cov2(c.s22, c.s11, c.s12)
        return sw2 * steep_pair_expect(mirrored, act.slope, sur1.fn, order)
    return sw2 * gh_expect(c, sur1.fn, _deriv_map(act), order)


def nngp(spec: KernelSpec, L: int, x, y) -> float:
    """Covariance kernel value S(L)(x, y)."""
    if L < 1:
        raise PreconditionViolated(f"level must be >= 1, got {L}")
    x, y, _ = _pair(spec, x, y)
    return _triples(spec, L, x, y)[-1][2]


def cross_nngp(spec: KernelSpec, L: int, x, y) -> float:
    """Cross covariance of two activations sharing the same parameters."""
    if spec.activation2 is None:
        raise PreconditionViolated("cross covariance needs a second activation")
    return nngp(spec, L, x, y)


def nngp_dot(spec: KernelSpec, L: int, x, y):
    """Derivative factor S_dot(L)(x, y); Divergent on the steep-slope diagonal."""
    if L < 2:
        raise PreconditionViolated(f"derivative factor starts at level 2, got {L}")
    x, y, diagonal = _pair(spec, x, y)
    prev = _triples(spec, L - 1, x, y)[-1]
    return _dot_level(spec, prev, diagonal)


def ntk(spec: KernelSpec, L: int, x, y):
    """Tangent kernel value T(L)(x, y); Divergent on the steep-slope diagonal."""
    if L < 1:
        raise PreconditionViolated(f"level must be >= 1, got {L}")
    x, y, diagonal = _pair(spec, x, y)
    triples = _triples(spec, L, x, y)
    tangent = triples[0][2]
    if spec.mode == MODE_SIGN and diagonal and L >= 2:
        rate = triples[0][0]
        for level in range(2, L + 1):
            sw2 = spec.sigma_w**2
            rate *= (2.0 * sw2 / math.pi) / math.sqrt(triples[level - 2][0])
        return Divergent(rate=rate, power=L - 1)
    for level in range(2, L + 1):
        dot = _dot_level(spec, triples[level - 2], diagonal)
        tangent = triples[level - 1][2] + tangent * dot
    return tangent


def surrogate_sigma(spec: KernelSpec, L: int, x, y) -> float:
    """Surrogate factor at level L (finite everywhere, asymmetric in x, y)."""
    if L < 2:
        raise PreconditionViolated(f"surrogate factor starts at level 2, got {L}")
    x, y, diagonal = _pair(spec, x, y)
    prev = _triples(spec, L - 1, x, y)[-1]
    return _surrogate_level(spec, prev, diagonal)


def sg_ntk(spec: KernelSpec, L: int, x, y) -> float:
    """Surrogate-gradient tangent kernel I(L)(x, y), finite on the diagonal."""
    if L < 1:
        raise PreconditionViolated(f"level must be >= 1, got {L}")
    x, y, diagonal = _pair(spec, x, y)
    triples = _triples(spec, L, x, y)
    value = triples[0][2]
    for level in range(2, L + 1):
        stil = _surrogate_level(spec, triples[level - 2], diagonal)
        value = triples[level - 1][2] + value * stil
    return value


_DISPATCH = {
    KIND_NNGP: nngp,
    KIND_NNGP_DOT: nngp_dot,
    KIND_NTK: ntk,
    KIND_CROSS_NNGP: cross_nngp,
    KIND_SURROGATE_SIGMA: surrogate_sigma,
    KIND_SG_NTK: sg_ntk,
}


def kernel_value(spec: KernelSpec, x, y, L: int | None = None):
    """Evaluate the kernel named by spec.kind at one pair."""
    return _DISPATCH[spec.kind](spec, spec.depth if L is None else L, x, y)


@dataclass
class AnalyticGram:
    """Kernel values over a point grid with divergent entries masked.

    ``values`` holds 0.0 wherever ``divergent_mask`` is True; consumers must
    branch on the mask rather than read those placeholders.
    """

    values: np.ndarray
    divergent_mask: np.ndarray

    @property
    def any_divergent(self) -> bool:
        return bool(self.divergent_mask.any())

    def require_finite(self) -> np.ndarray:
        if self.any_divergent:
            count = int(self.divergent_mask.sum())
            raise DivergentKernel(f"Gram matrix has {count} divergent entries")
        return self.values


def kernel_matrix(spec: KernelSpec, points, points2=None, L: int | None = None) -> AnalyticGram:
    """Kernel over all pairs of two point lists (rows: first list)."""
    pts1 = np.atleast_2d(np.asarray(points, dtype=float))
    pts2 = pts1 if points2 is None else np.atleast_2d(np.asarray(points2, dtype=float))
    values = np.zeros((pts1.shape[0], pts2.shape[0]))
    mask = np.zeros(values.shape, dtype=bool)
    for i, xi in enumerate(pts1):
        for j, yj in enumerate(pts2):
            val = kernel_value(spec, xi, yj, L)
            if is_divergent(val):
                mask[i, j] = True
            else:
                values[i, j] = float(val)
    return AnalyticGram(values=values, divergent_mask=mask)


def singular_exponent(spec: KernelSpec, L: int | None = None,
                      window: tuple[float, float] = (1e-6, 1e-3), points: int = 12) -> float:
    """Fitted blow-up exponent of the steep-slope tangent kernel near the diagonal.

    Samples unit-sphere pairs with inner product z = 1 - g for g log-spaced in
    ``window``, fits log T against log(1 - z), and returns the negated slope.
    For depth levels 2, 3, 4 the exponent approaches 1/2, 3/4, 7/8.
    """
    if spec.kind != KIND_NTK or spec.mode != MODE_SIGN:
        raise PreconditionViolated("exponent fit needs a steep-slope tangent kernel spec")
    level = spec.depth if L is None else L
    if level < 2:
        raise PreconditionViolated("exponent fit needs at least two layers")
    gaps = np.geomspace(window[0], window[1], points)
    x = np.array([1.0, 0.0])
    vals = []
    for g in gaps:
        z = 1.0 - g
        y = np.array([z, math.sqrt(max(0.0, 1.0 - z * z))])
        vals.append(float(ntk(spec, level, x, y)))
    slope = np.polyfit(np.log(gaps), np.log(vals), 1)[0]
    return float(-slope)


def _coerce_surrogate(sur) -> SurrogateSpec | None:
    if sur is None or isinstance(sur, SurrogateSpec):
        return sur
    from .activations import parse_surrogate

    return parse_surrogate(sur)


def sign_spec(kind: str, depth: int, sigma_w: float = 1.0, sigma_b: float = 0.1,
              surrogate2: SurrogateSpec | str | None = None, quad_order: int = 64) -> KernelSpec:
    """Steep-slope-limit spec with the step activation filled in."""
    from .activations import make_sign

    return KernelSpec(
        kind=kind, depth=depth, sigma_w=sigma_w, sigma_b=sigma_b,
        activation1=make_sign(), surrogate2=_coerce_surrogate(surrogate2),
        mode=MODE_SIGN, quad_order=quad_order,
    )


def erf_spec(kind: str, depth: int, m: float, sigma_w: float = 1.0, sigma_b: float = 0.1,
             surrogate2: SurrogateSpec | str | None = None, quad_order: int = 64) -> KernelSpec:
    """Finite-slope closed-form spec with an erf activation of slope m."""
    from .activations import make_erf_m

    return KernelSpec(
        kind=kind, depth=depth, sigma_w=sigma_w, sigma_b=sigma_b,
        activation1=make_erf_m(m), surrogate2=_coerce_surrogate(surrogate2),
        mode=MODE_CLOSED, quad_order=quad_order,
    )


def swap_slots(spec: KernelSpec) -> KernelSpec:
    """Exchange the two scalar-map slots (used to test the transpose identity)."""
    return replace(
        spec,
        activation1=spec.second_activation(),
        activation2=spec.activation1,
        surrogate1=spec.surrogate2,
        surrogate2=spec.surrogate1,
    )
