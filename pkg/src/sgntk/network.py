"""Finite-width multilayer perceptron with NTK scaling.

Preactivations follow

    h1(x) = (sigma_w / sqrt(n0)) W1 x + sigma_b b1
    h(l+1)(x) = (sigma_w / sqrt(nl)) W(l+1) act(h(l)(x)) + sigma_b b(l+1)

with all weight and bias entries drawn iid standard normal at initialization.
The network output is the final preactivation; no activation is applied after
the last layer.  An optional output scale kappa multiplies the last layer's
parameters at initialization, which shrinks the initial function values by
kappa while leaving the training dynamics' parametrization unchanged.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .activations import ActivationSpec, parse_activation
from .errors import DimensionMismatch, InvalidScale
from .rng import derive_seed, normal_tensor


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture, scalings and seed for one network."""

    widths: tuple[int, ...]  # (n0, ..., nL), input to output
    sigma_w: float
    sigma_b: float
    activation: ActivationSpec
    seed: int
    kappa: float = 1.0

    def __post_init__(self):
        if len(self.widths) < 2:
            raise InvalidScale("need at least an input and an output layer")
        if any(int(w) < 1 for w in self.widths):
            raise InvalidScale(f"all widths must be >= 1, got {self.widths}")
        if not (self.sigma_w > 0):
            raise InvalidScale(f"sigma_w must be positive, got {self.sigma_w}")
        if self.sigma_b < 0:
            raise InvalidScale(f"sigma_b must be nonnegative, got {self.sigma_b}")
        if not (0 < self.kappa <= 1):
            raise InvalidScale(f"kappa must lie in (0, 1], got {self.kappa}")

    @property
    def depth(self) -> int:
        """Number of layers L (the output is h(L))."""
        return len(self.widths) - 1

    @property
    def param_count(self) -> int:
        return sum(n_out * (n_in + 1) for n_in, n_out in zip(self.widths, self.widths[1:]))


@dataclass
class Network:
    """A concrete parameter set for a NetworkConfig.

    ``weights[l]`` has shape (n_{l+1}, n_l) and ``biases[l]`` shape (n_{l+1},),
    for l = 0 .. L-1.
    """

    config: NetworkConfig
    weights: list[np.ndarray] = field(repr=False)
    biases: list[np.ndarray] = field(repr=False)


def init(config: NetworkConfig) -> Network:
    """Draw a fresh network; deterministic in config.seed."""
    weights, biases = [], []
    depth = config.depth
    for layer in range(1, depth + 1):
        n_in, n_out = config.widths[layer - 1], config.widths[layer]
        w = normal_tensor(config.seed, (n_out, n_in), "W", layer)
        b = normal_tensor(config.seed, (n_out,), "b", layer)
        if layer == depth and config.kappa != 1.0:
            w = config.kappa * w
            b = config.kappa * b
        weights.append(w)
        biases.append(b)
    return Network(config=config, weights=weights, biases=biases)


def forward_batch(net: Network, xs: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Forward pass for a batch of inputs.

    Returns (outputs, preacts) where outputs has shape (batch, nL) and
    preacts[l] holds h(l+1) with shape (batch, n_{l+1}).
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != net.config.widths[0]:
        raise DimensionMismatch(
            f"expected inputs of shape (batch, {net.config.widths[0]}), got {xs.shape}"
        )
    cfg = net.config
    act = cfg.activation.fn
    preacts: list[np.ndarray] = []
    a = xs
    for layer in range(cfg.depth):
        scale = cfg.sigma_w / math.sqrt(cfg.widths[layer])
        h = scale * (a @ net.weights[layer].T) + cfg.sigma_b * net.biases[layer]
        preacts.append(h)
        if layer < cfg.depth - 1:
            a = act(h)
    return preacts[-1], preacts


def forward(net: Network, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Forward pass for a single input vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a flat input vector, got shape {x.shape}")
    out, preacts = forward_batch(net, x[None, :])
    return out[0], [h[0] for h in preacts]


@dataclass
class EnsembleStats:
    """Sample statistics of network outputs over freshly initialized members.

    ``mean`` has shape (n_points, nL); ``cov`` has shape (nL, n_points,
    n_points), one covariance per output neuron; ``cov_se`` holds matching
    standard-error estimates.  In paired mode ``cov`` is the cross-covariance
    Cov[f1(x_i), f2(x_j)] of the two activations run on shared parameters, and
    ``mean2`` holds the second activation's mean.
    """

    mean: np.ndarray
    cov: np.ndarray
    cov_se: np.ndarray
    count: int
    mean2: np.ndarray | None = None


def member_config(config: NetworkConfig, member: int) -> NetworkConfig:
    """Config for one ensemble member, with its own derived seed."""
    return replace(config, seed=derive_seed(config.seed, "ens", member))


def _member_outputs(config: NetworkConfig, member: int, xs: np.ndarray,
                    activation2: ActivationSpec | None) -> tuple[np.ndarray, np.ndarray | None]:
    net = init(member_config(config, member))
    out1, _ = forward_batch(net, xs)
    out2 = None
    if activation2 is not None:
        twin = Network(
            config=replace(net.config, activation=activation2),
            weights=net.weights,
            biases=net.biases,
        )
        out2, _ = forward_batch(twin, xs)
    return out1, out2


def ensemble_statistics(config: NetworkConfig, count: int, points,
                        activation2: ActivationSpec | None = None) -> EnsembleStats:
    """Output mean and covariance over ``count`` freshly initialized networks.

    With ``activation2`` given, the same drawn parameters are run through both
    activations (shared-weight paired mode) and ``cov`` becomes the
    cross-covariance between the first and second activation's outputs.
    """
    if count < 2:
        raise InvalidScale(f"need at least 2 ensemble members, got {count}")
    xs = np.atleast_2d(np.asarray(points, dtype=float))
    d = xs.shape[0]
    n_out = config.widths[-1]
    outs1 = np.empty((count, d, n_out))
    outs2 = np.empty((count, d, n_out)) if activation2 is not None else None
    for member in range(count):
        o1, o2 = _member_outputs(config, member, xs, activation2)
        outs1[member] = o1
        if outs2 is not None:
            outs2[member] = o2
    mean1 = outs1.mean(axis=0)
    second = outs1 if outs2 is None else outs2
    mean_second = second.mean(axis=0)
    centered1 = outs1 - mean1
    centered2 = second - mean_second
    # Per output neuron k: cov[k, i, j] = sample Cov[f1(x_i, k), f2(x_j, k)].
    prods = np.einsum("mik,mjk->mijk", centered1, centered2)
    cov = prods.sum(axis=0) / (count - 1)
    cov_se = prods.std(axis=0, ddof=1) / math.sqrt(count)
    return EnsembleStats(
        mean=mean1,
        cov=np.moveaxis(cov, -1, 0),
        cov_se=np.moveaxis(cov_se, -1, 0),
        count=count,
        mean2=None if outs2 is None else mean_second,
    )


def to_json(net: Network) -> str:
    """Serialize a network (config header plus parameters) to JSON."""
    doc = {
        "config": _config_doc(net.config),
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }
    return json.dumps(doc)


def from_json(text: str) -> Network:
    doc = json.loads(text)
    config = _config_from_doc(doc["config"])
    weights = [np.asarray(w, dtype=float) for w in doc["weights"]]
    biases = [np.asarray(b, dtype=float) for b in doc["biases"]]
    return Network(config=config, weights=weights, biases=biases)


def to_bytes(net: Network) -> bytes:
    """Serialize to a compact binary blob: JSON header, then raw float64 data.

    Parameters are laid out layer by layer, weights (row-major) before biases.
    """
    header = json.dumps(_config_doc(net.config)).encode("utf-8")
    buf = io.BytesIO()
    buf.write(len(header).to_bytes(8, "little"))
    buf.write(header)
    for w, b in zip(net.weights, net.biases):
        buf.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
        buf.write(np.ascontiguousarray(b, dtype="<f8").tobytes())
    return buf.getvalue()


def from_bytes(blob: bytes) -> Network:
    header_len = int.from_bytes(blob[:8], "little")
    config = _config_from_doc(json.loads(blob[8 : 8 + header_len].decode("utf-8")))
    offset = 8 + header_len
    weights, biases = [], []
    for n_in, n_out in zip(config.widths, config.widths[1:]):
        w = np.frombuffer(blob, dtype="<f8", count=n_out * n_in, offset=offset)
        offset += n_out * n_in * 8
        b = np.frombuffer(blob, dtype="<f8", count=n_out, offset=offset)
        offset += n_out * 8
        weights.append(w.reshape(n_out, n_in).copy())
        biases.append(b.copy())
    return Network(config=config, weights=weights, biases=biases)


def _config_doc(config: NetworkConfig) -> dict:
    return {
        "widths": list(config.widths),
        "sigma_w": config.sigma_w,
        "sigma_b": config.sigma_b,
        "activation": config.activation.name,
        "seed": int(config.seed),
        "kappa": config.kappa,
    }


def _config_from_doc(doc: dict) -> NetworkConfig:
    return NetworkConfig(
        widths=tuple(int(w) for w in doc["widths"]),
        sigma_w=float(doc["sigma_w"]),
        sigma_b=float(doc["sigma_b"]),
        activation=parse_activation(doc["activation"]),
        seed=int(doc["seed"]),
        kappa=float(doc["kappa"]),
    )
