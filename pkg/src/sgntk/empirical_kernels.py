"""Quasi-Jacobians and empirical kernels of finite networks.

The quasi-Jacobian of a network at x is the row of parameter sensitivities of
each output neuron, except that the backward pass may use a surrogate scalar
map in place of the activation's true derivative.  With the true derivative it
coincides with the ordinary Jacobian of the forward pass.  Pairing two
quasi-Jacobians gives the empirical (generalized) tangent kernel

    K(x, y) = J1(x) @ J2(y).T

which is the quantity whose infinite-width limits the analytic module
computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .activations import SurrogateSpec
from .errors import DimensionMismatch, MissingSurrogate
from .network import Network, forward
from .tableio import write_csv


@dataclass
class QuasiJacobian:
    """Parameter sensitivities of each output neuron at one input.

    ``matrix`` has shape (n_L, P).  Columns are ordered layer 1..L, with each
    layer's weight entries (row-major) before its biases.
    """

    matrix: np.ndarray
    activation: str
    surrogate: str


def resolve_surrogate(net: Network, surrogate) -> tuple:
    """Return (scalar map, name) for a surrogate argument.

    Accepts a SurrogateSpec, a plain callable, or None for the activation's
    true derivative.  None is rejected when the activation has no derivative.
    """
    if surrogate is None:
        act = net.config.activation
        if not act.has_derivative:
            raise MissingSurrogate(
                f"activation {act.name!r} has no derivative; pass a surrogate explicitly"
            )
        return act.deriv, f"deriv({act.name})"
    if isinstance(surrogate, SurrogateSpec):
        return surrogate.fn, surrogate.name
    if callable(surrogate):
        return surrogate, getattr(surrogate, "__name__", "custom")
    raise TypeError(f"cannot interpret surrogate {surrogate!r}")


def quasi_jacobian(net: Network, surrogate, x: np.ndarray) -> QuasiJacobian:
    """One reverse sweep over the layer recursion at input x.

    Weight entry (i, j) of layer l receives delta_i * (sigma_w/sqrt(n_{l-1}))
    * act(h^{(l-1)}_j) (with act(h^{(0)}) = x), the bias entry receives
    delta_i * sigma_b, and the running delta is back-propagated through the
    surrogate map evaluated at the stored preactivations.
    """
    sur_fn, sur_name = resolve_surrogate(net, surrogate)
    x = np.asarray(x, dtype=float)
    cfg = net.config
    out, preacts = forward(net, x)
    acts: list[np.ndarray] = [x]
    for h in preacts[:-1]:
        acts.append(np.asarray(cfg.activation.fn(h), dtype=float))

    n_out = cfg.widths[-1]
    delta = np.eye(n_out)
    rev_blocks: list[np.ndarray] = []
    for layer in range(cfg.depth, 0, -1):
        scale = cfg.sigma_w / math.sqrt(cfg.widths[layer - 1])
        j_w = delta[:, :, None] * (scale * acts[layer - 1])[None, None, :]
        j_b = cfg.sigma_b * delta
        rev_blocks.append(j_b)
        rev_blocks.append(j_w.reshape(n_out, -1))
        if layer > 1:
            gate = np.asarray(sur_fn(preacts[layer - 2]), dtype=float)
            delta = (delta @ net.weights[layer - 1]) * (scale * gate)
    matrix = np.concatenate(rev_blocks[::-1], axis=1)
    return QuasiJacobian(matrix=matrix, activation=cfg.activation.name, surrogate=sur_name)


def empirical_generalized_ntk(net: Network, s1, s2, x, x2=None) -> np.ndarray:
    """K(x, x2) = J1(x) @ J2(x2).T as an (n_L, n_L) matrix.

    With both surrogates equal to the true derivative this is the empirical
    tangent kernel of the network.
    """
    if x2 is None:
        x2 = x
    j1 = quasi_jacobian(net, s1, x).matrix
    j2 = quasi_jacobian(net, s2, x2).matrix
    return j1 @ j2.T


def empirical_ntk(net: Network, x, x2=None) -> np.ndarray:
    """Empirical tangent kernel using the activation's true derivative."""
    return empirical_generalized_ntk(net, None, None, x, x2)


@dataclass
class EmpiricalKernel:
    """Kernel values over all point pairs; blocks has shape (d, d, n_L, n_L)."""

    blocks: np.ndarray

    def matrix(self) -> np.ndarray:
        """Collapse to (d, d) when n_L = 1, else to the (d n_L, d n_L) block form."""
        d, _, n_out, _ = self.blocks.shape
        if n_out == 1:
            return self.blocks[:, :, 0, 0]
        return self.blocks.transpose(0, 2, 1, 3).reshape(d * n_out, d * n_out)


def kernel_gram(net: Network, s1, s2, points) -> EmpiricalKernel:
    """Kernel over all pairs of points, reusing one quasi-Jacobian per point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != net.config.widths[0]:
        raise DimensionMismatch(
            f"points have dimension {pts.shape[1]}, expected {net.config.widths[0]}"
        )
    j1 = np.stack([quasi_jacobian(net, s1, p).matrix for p in pts])
    same = s1 is s2 or (
        isinstance(s1, SurrogateSpec) and isinstance(s2, SurrogateSpec) and s1.name == s2.name
    )
    j2 = j1 if same else np.stack([quasi_jacobian(net, s2, p).matrix for p in pts])
    blocks = np.einsum("aip,bjp->abij", j1, j2)
    return EmpiricalKernel(blocks=blocks)


def gram_to_csv(gram: np.ndarray, path) -> None:
    """Write a (d, d) Gram matrix as CSV with a header row of point indices."""
    gram = np.asarray(gram)
    header = ["index"] + [str(j) for j in range(gram.shape[1])]
    rows = [[str(i)] + list(gram[i]) for i in range(gram.shape[0])]
    write_csv(path, header, rows)
