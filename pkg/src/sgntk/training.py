"""Full-batch gradient training with optional surrogate backward maps.

The update is a forward-Euler step on the summed squared-error loss

    L = 0.5 * || f(X) - Y ||^2,

so one step moves every parameter by -eta * J~.T @ (f(X) - Y), where J~ is
the quasi-Jacobian of the batch: the backward pass may evaluate a bounded
surrogate map at the stored preactivations instead of the activation's true
derivative, while the forward pass always keeps the activation itself.  With
the true derivative this is plain gradient descent.  The loss carries no 1/N
factor; learning rates are quoted against the summed loss.

Ensembles train as stacked (member, ...) parameter arrays so one hundred
networks advance in a single batched matmul per layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .activations import SurrogateSpec
from .empirical_kernels import kernel_gram
from .errors import (
    DimensionMismatch,
    InvalidScale,
    MissingSurrogate,
    NonFiniteLoss,
    PreconditionViolated,
)
from .network import Network, NetworkConfig, init, member_config

RULE_GRADIENT_DESCENT = "gradient-descent"
RULE_SURROGATE = "surrogate-gradient"
_RULES = {RULE_GRADIENT_DESCENT, RULE_SURROGATE}

DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class TrainConfig:
    """Learning rate, step budget and update rule for one training run."""

    eta: float
    steps: int
    rule: str = RULE_GRADIENT_DESCENT
    surrogate: SurrogateSpec | None = None
    record_kernel_every: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if not (self.eta > 0):
            raise InvalidScale(f"eta must be positive, got {self.eta}")
        if self.steps < 0:
            raise InvalidScale(f"steps must be >= 0, got {self.steps}")
        if self.rule not in _RULES:
            raise ValueError(f"unknown training rule {self.rule!r}")
        if self.rule == RULE_SURROGATE and self.surrogate is None:
            raise MissingSurrogate("surrogate-gradient training needs a surrogate map")
        if self.record_kernel_every is not None and self.record_kernel_every < 1:
            raise InvalidScale(
                f"record_kernel_every must be >= 1, got {self.record_kernel_every}"
            )


@dataclass
class TrainTrace:
    """Per-step losses, the trained network, and optional kernel samples.

    ``losses[t]`` is the loss after t steps (so entry 0 is the initial loss).
    When kernel recording is on, ``kernel_grams[i]`` holds the empirical
    generalized tangent Gram over the training inputs after
    ``kernel_steps[i]`` steps and ``drift_from_start`` its Frobenius distance
    to the step-0 Gram.
    """

    losses: np.ndarray
    network: Network
    kernel_steps: list[int] = field(default_factory=list)
    kernel_grams: list[np.ndarray] = field(default_factory=list)
    drift_from_start: np.ndarray | None = None


@dataclass
class EnsembleState:
    """Stacked parameters of ``count`` independently seeded networks."""

    config: NetworkConfig
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    count: int


@dataclass
class EnsembleTrainResult:
    """Loss history per member plus the final stacked parameters."""

    state: EnsembleState
    losses: np.ndarray
    kernel_steps: list[int] = field(default_factory=list)
    drift_from_start: np.ndarray | None = None


@dataclass
class DriftSeries:
    """Frobenius distances of recorded kernel Grams to references."""

    from_start: np.ndarray
    from_analytic: np.ndarray | None = None


def _as_xy(data) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(data, "inputs") and hasattr(data, "targets"):
        xs, ys = data.inputs, data.targets
    else:
        xs, ys = data
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ys.ndim == 1:
        ys = ys[:, None]
    if xs.ndim != 2 or ys.ndim != 2 or xs.shape[0] != ys.shape[0]:
        raise DimensionMismatch(
            f"expected matching (batch, dim) arrays, got {xs.shape} and {ys.shape}"
        )
    return xs, ys


def _update_map(config: NetworkConfig, cfg: TrainConfig):
    """Scalar map used in the backward pass, per the training rule."""
    if cfg.rule == RULE_SURROGATE:
        return cfg.surrogate.fn
    act = config.activation
    if not act.has_derivative:
        raise MissingSurrogate(
            f"activation {act.name!r} has no derivative; train with a surrogate rule"
        )
    return act.deriv


def init_ensemble(config: NetworkConfig, count: int) -> EnsembleState:
    """Stack ``count`` freshly initialized member networks.

    Member i carries the same derived seed as ensemble_statistics uses, so a
    trained member can be compared against its own standalone initialization.
    """
    if count < 1:
        raise InvalidScale(f"need at least one member, got {count}")
    members = [init(member_config(config, i)) for i in range(count)]
    depth = config.depth
    weights = [np.stack([m.weights[l] for m in members]) for l in range(depth)]
    biases = [np.stack([m.biases[l] for m in members]) for l in range(depth)]
    return EnsembleState(config=config, weights=weights, biases=biases, count=count)


def member_network(state: EnsembleState, member: int) -> Network:
    """Extract one member as a standalone Network (copies the parameters)."""
    if not (0 <= member < state.count):
        raise PreconditionViolated(f"member {member} outside 0..{state.count - 1}")
    return Network(
        config=member_config(state.config, member),
        weights=[w[member].copy() for w in state.weights],
        biases=[b[member].copy() for b in state.biases],
    )


def _forward_stack(state: EnsembleState, xs: np.ndarray):
    """Batched forward pass; returns (outputs, preacts, layer inputs)."""
    cfg = state.config
    act = cfg.activation.fn
    a = np.broadcast_to(xs, (state.count,) + xs.shape)
    acts = [a]
    preacts = []
    for layer in range(cfg.depth):
        scale = cfg.sigma_w / math.sqrt(cfg.widths[layer])
        h = np.matmul(a, state.weights[layer].transpose(0, 2, 1))
        h *= scale
        h += cfg.sigma_b * state.biases[layer][:, None, :]
        preacts.append(h)
        if layer < cfg.depth - 1:
            a = act(h)
            acts.append(a)
    return preacts[-1], preacts, acts


def ensemble_outputs(state: EnsembleState, points) -> np.ndarray:
    """Member outputs on a point grid, shape (count, n_points, n_L)."""
    xs = np.atleast_2d(np.asarray(points, dtype=float))
    out, _, _ = _forward_stack(state, xs)
    return out


def _gradients(state: EnsembleState, preacts, acts, residual, sur_fn,
               prefactor: float = 1.0, out_w=None):
    """Backward sweep: summed-loss gradients for every layer and member.

    The sweep is linear in ``residual``, so ``prefactor`` (e.g. a learning
    rate) multiplies every gradient exactly once when folded in at the source.
    ``out_w`` optionally supplies reusable per-layer weight-gradient buffers.
    """
    cfg = state.config
    delta = prefactor * residual
    grads_w = [None] * cfg.depth
    grads_b = [None] * cfg.depth
    for layer in range(cfg.depth, 0, -1):
        scale = cfg.sigma_w / math.sqrt(cfg.widths[layer - 1])
        grads_b[layer - 1] = cfg.sigma_b * delta.sum(axis=1)
        # Fold the layer scale into the small delta block once, so both the
        # weight gradient and the propagated delta inherit it for free.
        scaled = scale * delta
        out = None if out_w is None else out_w[layer - 1]
        grads_w[layer - 1] = np.matmul(
            scaled.transpose(0, 2, 1), acts[layer - 1], out=out
        )
        if layer > 1:
            gate = np.asarray(sur_fn(preacts[layer - 2]), dtype=float)
            delta = np.matmul(scaled, state.weights[layer - 1])
            delta *= gate
    return grads_w, grads_b


def _record_schedule(steps: int, every: int | None) -> list[int]:
    if every is None:
        return []
    marks = sorted(set(range(0, steps + 1, every)) | {steps})
    return marks


def _member_gram(state: EnsembleState, member: int, xs, cfg: TrainConfig) -> np.ndarray:
    s2 = cfg.surrogate if cfg.rule == RULE_SURROGATE else None
    return kernel_gram(member_network(state, member), None, s2, xs).matrix()


def _run(state: EnsembleState, xs, ys, cfg: TrainConfig):
    """Shared training loop over stacked parameters.

    Returns (losses (count, steps+1), kernel steps, per-member Gram samples).
    Raises NonFiniteLoss with the partial loss history attached as ``.losses``
    if any member's loss stops being finite or exceeds 1e6 times its start.
    """
    sur_fn = _update_map(state.config, cfg)
    marks = _record_schedule(cfg.steps, cfg.record_kernel_every)
    losses = np.empty((state.count, cfg.steps + 1))
    gram_samples: list[list[np.ndarray]] = [[] for _ in range(state.count)]

    def record_kernels(step):
        if step in marks:
            for m in range(state.count):
                gram_samples[m].append(_member_gram(state, m, xs, cfg))

    grad_buffers = [np.empty_like(w) for w in state.weights] if cfg.steps else None
    ceiling = None
    for step in range(cfg.steps + 1):
        out, preacts, acts = _forward_stack(state, xs)
        residual = out - ys
        loss = 0.5 * np.einsum("mnk,mnk->m", residual, residual)
        losses[:, step] = loss
        if ceiling is None:
            ceiling = DIVERGENCE_FACTOR * np.maximum(loss, 1e-12)
        if not np.isfinite(loss).all() or (loss > ceiling).any():
            err = NonFiniteLoss(f"loss diverged at step {step}")
            err.losses = losses[:, : step + 1]
            raise err
        record_kernels(step)
        if step == cfg.steps:
            break
        grads_w, grads_b = _gradients(
            state, preacts, acts, residual, sur_fn, cfg.eta, grad_buffers
        )
        for l in range(state.config.depth):
            state.weights[l] -= grads_w[l]
            state.biases[l] -= grads_b[l]
    return losses, marks, gram_samples


def _drift(grams: Sequence[np.ndarray]) -> np.ndarray:
    base = grams[0]
    return np.array([np.linalg.norm(g - base) for g in grams])


def train(net: Network, data, cfg: TrainConfig) -> TrainTrace:
    """Train one network; the input network is left untouched."""
    xs, ys = _as_xy(data)
    if ys.shape[1] != net.config.widths[-1]:
        raise DimensionMismatch(
            f"targets have dimension {ys.shape[1]}, network emits {net.config.widths[-1]}"
        )
    state = EnsembleState(
        config=net.config,
        weights=[w[None].copy() for w in net.weights],
        biases=[b[None].copy() for b in net.biases],
        count=1,
    )
    losses, marks, gram_samples = _run(state, xs, ys, cfg)
    final = Network(
        config=net.config,
        weights=[w[0] for w in state.weights],
        biases=[b[0] for b in state.biases],
    )
    grams = gram_samples[0]
    return TrainTrace(
        losses=losses[0],
        network=final,
        kernel_steps=marks,
        kernel_grams=grams,
        drift_from_start=_drift(grams) if grams else None,
    )


def train_ensemble(state: EnsembleState, data, cfg: TrainConfig) -> EnsembleTrainResult:
    """Train all members in place on the same batch; returns loss history."""
    xs, ys = _as_xy(data)
    if ys.shape[1] != state.config.widths[-1]:
        raise DimensionMismatch(
            f"targets have dimension {ys.shape[1]}, networks emit {state.config.widths[-1]}"
        )
    losses, marks, gram_samples = _run(state, xs, ys, cfg)
    drift = None
    if marks:
        drift = np.stack([_drift(g) for g in gram_samples])
    return EnsembleTrainResult(
        state=state, losses=losses, kernel_steps=marks, drift_from_start=drift
    )


def kernel_drift(trajectory, points=None, s1=None, s2=None, analytic=None) -> DriftSeries:
    """Frobenius drift of the empirical generalized tangent Gram.

    ``trajectory`` is either a TrainTrace whose run recorded kernel samples,
    or a sequence of Networks to evaluate afresh with the (s1, s2) backward
    slots over ``points``.  ``analytic`` optionally adds distances to a fixed
    reference Gram.
    """
    if isinstance(trajectory, TrainTrace):
        grams = trajectory.kernel_grams
        if not grams:
            raise PreconditionViolated(
                "trace holds no kernel samples; train with record_kernel_every set"
            )
    else:
        if points is None:
            raise PreconditionViolated("a network trajectory needs evaluation points")
        grams = [kernel_gram(net, s1, s2, points).matrix() for net in trajectory]
    from_analytic = None
    if analytic is not None:
        reference = np.asarray(analytic, dtype=float)
        from_analytic = np.array([np.linalg.norm(g - reference) for g in grams])
    return DriftSeries(from_start=_drift(grams), from_analytic=from_analytic)
