"""Activation functions, their derivatives, and surrogate derivatives.

Activations and surrogates are immutable values carrying their scalar maps
(vectorized over numpy arrays) together with the bounds the kernel theory
needs: a linear envelope |sigma(u)| <= c + m|u| for activations, and
bounded/Lipschitz constants for surrogates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf as _erf

from .errors import InvalidScale

#: Marker used in place of a derivative for activations that are not
#: differentiable on a set of positive measure boundary (the step function).
UNDEFINED_AE = "undefined-a.e."

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class ActivationSpec:
    """A scalar activation with its derivative and linear envelope bound.

    ``slope`` is set for the erf family (the m in erf(m z)) and None
    otherwise; kernel closed forms key off it.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray] | str
    envelope: tuple[float, float]  # (c, m) with |fn(u)| <= c + m * |u|
    slope: float | None = None

    @property
    def has_derivative(self) -> bool:
        return not isinstance(self.deriv, str)


@dataclass(frozen=True)
class SurrogateSpec:
    """A bounded surrogate derivative used in place of the true one."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    bound: float
    lipschitz: float


def make_erf_m(m: float) -> ActivationSpec:
    """Error function activation with slope m: z -> erf(m * z)."""
    if not (m > 0) or not math.isfinite(m):
        raise InvalidScale(f"slope m must be positive and finite, got {m}")
    m = float(m)

    def fn(z):
        return _erf(m * z)

    def deriv(z):
        z = np.asarray(z, dtype=float)
        return _TWO_OVER_SQRT_PI * m * np.exp(-((m * z) ** 2))

    return ActivationSpec(name=f"erf:m={m:g}", fn=fn, deriv=deriv, envelope=(1.0, 0.0), slope=m)


def make_sign() -> ActivationSpec:
    """Step activation: -1 below zero, +1 above, 0 at zero."""
    return ActivationSpec(name="sign", fn=np.sign, deriv=UNDEFINED_AE, envelope=(1.0, 0.0))


def surrogate_erf_deriv() -> SurrogateSpec:
    """Surrogate equal to the derivative of erf: z -> (2/sqrt(pi)) exp(-z^2)."""

    def fn(z):
        z = np.asarray(z, dtype=float)
        return _TWO_OVER_SQRT_PI * np.exp(-(z**2))

    # Slope is steepest at z = 1/sqrt(2).
    lip = _TWO_OVER_SQRT_PI * math.sqrt(2.0) * math.exp(-0.5)
    return SurrogateSpec(name="derf", fn=fn, bound=_TWO_OVER_SQRT_PI, lipschitz=lip)


def surrogate_rect(w: float = 1.0) -> SurrogateSpec:
    """Rectangular window surrogate: 1 on |z| <= w/2, else 0."""
    if not (w > 0) or not math.isfinite(w):
        raise InvalidScale(f"window width must be positive and finite, got {w}")
    half = float(w) / 2.0

    def fn(z):
        z = np.asarray(z, dtype=float)
        return np.where(np.abs(z) <= half, 1.0, 0.0)

    # The jump at the window edge admits no finite Lipschitz constant.
    return SurrogateSpec(name=f"rect:w={w:g}", fn=fn, bound=1.0, lipschitz=math.inf)


def surrogate_sech2() -> SurrogateSpec:
    """Smooth bump surrogate: z -> sech(z)^2, the derivative of tanh."""

    def fn(z):
        z = np.asarray(z, dtype=float)
        return 1.0 / np.cosh(z) ** 2

    # Slope is steepest where |d/dz sech^2| peaks, at 4/(3*sqrt(3)).
    return SurrogateSpec(name="sech2", fn=fn, bound=1.0, lipschitz=4.0 / (3.0 * math.sqrt(3.0)))


def parse_activation(text: str) -> ActivationSpec:
    """Parse an activation from its CLI string, e.g. "erf:m=2" or "sign"."""
    text = text.strip()
    if text == "sign":
        return make_sign()
    if text.startswith("erf:m="):
        try:
            m = float(text[len("erf:m=") :])
        except ValueError as exc:
            raise InvalidScale(f"bad slope in activation string {text!r}") from exc
        return make_erf_m(m)
    raise ValueError(f"unknown activation string {text!r}; expected 'erf:m=<float>' or 'sign'")


def parse_surrogate(text: str) -> SurrogateSpec:
    """Parse a surrogate from its CLI string: "derf", "rect:w=<float>" or "sech2"."""
    text = text.strip()
    if text == "derf":
        return surrogate_erf_deriv()
    if text == "sech2":
        return surrogate_sech2()
    if text.startswith("rect:w="):
        try:
            w = float(text[len("rect:w=") :])
        except ValueError as exc:
            raise InvalidScale(f"bad width in surrogate string {text!r}") from exc
        return surrogate_rect(w)
    raise ValueError(
        f"unknown surrogate string {text!r}; expected 'derf', 'rect:w=<float>' or 'sech2'"
    )
