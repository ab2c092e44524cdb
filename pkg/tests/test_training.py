"""Tests for gradient and surrogate-gradient training loops."""

import numpy as np
import pytest

from sgntk.activations import (
    SurrogateSpec,
    make_erf_m,
    make_sign,
    parse_surrogate,
    surrogate_erf_deriv,
)
from sgntk.empirical_kernels import kernel_gram, quasi_jacobian
from sgntk.errors import (
    DimensionMismatch,
    InvalidScale,
    MissingSurrogate,
    NonFiniteLoss,
    PreconditionViolated,
)
from sgntk.network import NetworkConfig, forward_batch, init, member_config
from sgntk.training import (
    DriftSeries,
    TrainConfig,
    ensemble_outputs,
    init_ensemble,
    kernel_drift,
    member_network,
    train,
    train_ensemble,
)


def sphere_batch(count=15, seed=3):
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0, 2 * np.pi, count)
    xs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    ys = (
        4 * xs[:, 0] * xs[:, 1] ** 2
        - 0.8 * xs[:, 0] ** 3
        + 1.2 * xs[:, 1] ** 2
        - 0.8 * xs[:, 0] ** 2 * xs[:, 1]
    )
    return xs, ys[:, None]


def make_net(widths=(2, 16, 16, 1), m=2.0, seed=5, kappa=1.0):
    cfg = NetworkConfig(
        widths=widths,
        sigma_w=1.0,
        sigma_b=0.1,
        activation=make_erf_m(m),
        seed=seed,
        kappa=kappa,
    )
    return init(cfg)


def flat_params(net):
    parts = []
    for w, b in zip(net.weights, net.biases):
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


class TestTrainConfig:
    def test_rejects_bad_scalars(self):
        with pytest.raises(InvalidScale):
            TrainConfig(eta=0.0, steps=10)
        with pytest.raises(InvalidScale):
            TrainConfig(eta=-0.1, steps=10)
        with pytest.raises(InvalidScale):
            TrainConfig(eta=0.1, steps=-1)
        with pytest.raises(InvalidScale):
            TrainConfig(eta=0.1, steps=10, record_kernel_every=0)

    def test_rejects_unknown_rule(self):
        with pytest.raises(ValueError):
            TrainConfig(eta=0.1, steps=10, rule="adam")

    def test_surrogate_rule_needs_surrogate(self):
        with pytest.raises(MissingSurrogate):
            TrainConfig(eta=0.1, steps=10, rule="surrogate-gradient")


class TestSingleNetwork:
    def test_zero_steps_leaves_network_unchanged(self):
        xs, ys = sphere_batch()
        net = make_net()
        before = flat_params(net)
        trace = train(net, (xs, ys), TrainConfig(eta=0.1, steps=0))
        np.testing.assert_array_equal(flat_params(trace.network), before)
        assert trace.losses.shape == (1,)

    def test_one_step_is_quasi_jacobian_euler_update(self):
        """One Euler step moves parameters by -eta * J~.T (f(X) - Y)."""
        xs, ys = sphere_batch()
        net = make_net(seed=7)
        eta = 0.05
        trace = train(net, (xs, ys), TrainConfig(eta=eta, steps=1))
        out0, _ = forward_batch(net, xs)
        residual = (out0 - ys).ravel()
        jac = np.vstack([quasi_jacobian(net, None, x).matrix for x in xs])
        want = flat_params(net) - eta * (jac.T @ residual)
        np.testing.assert_allclose(flat_params(trace.network), want, atol=1e-12)

    def test_input_network_left_untouched(self):
        xs, ys = sphere_batch()
        net = make_net()
        before = flat_params(net)
        train(net, (xs, ys), TrainConfig(eta=0.1, steps=5))
        np.testing.assert_array_equal(flat_params(net), before)

    def test_loss_decreases_for_small_eta(self):
        xs, ys = sphere_batch()
        for eta in (0.05, 0.005):
            trace = train(make_net(seed=1), (xs, ys), TrainConfig(eta=eta, steps=20))
            if np.all(np.diff(trace.losses) < 0):
                return
        raise AssertionError("loss failed to decrease even at the eta/10 fallback")

    def test_surrogate_equal_to_derivative_is_gradient_descent(self):
        """Same code path: SGL with the true derivative is bitwise plain GD."""
        xs, ys = sphere_batch()
        act = make_erf_m(2.0)
        true_slope = SurrogateSpec(
            name="true-slope-2", fn=act.deriv, bound=act.deriv(0.0), lipschitz=4.0
        )
        tr_gd = train(make_net(seed=2), (xs, ys), TrainConfig(eta=0.1, steps=40))
        tr_sg = train(
            make_net(seed=2),
            (xs, ys),
            TrainConfig(
                eta=0.1, steps=40, rule="surrogate-gradient", surrogate=true_slope
            ),
        )
        np.testing.assert_array_equal(tr_gd.losses, tr_sg.losses)
        for w1, w2 in zip(tr_gd.network.weights, tr_sg.network.weights):
            np.testing.assert_array_equal(w1, w2)
        for b1, b2 in zip(tr_gd.network.biases, tr_sg.network.biases):
            np.testing.assert_array_equal(b1, b2)

    def test_width_500_run_reaches_small_mse(self):
        """Depth-2 slope-2 net at width 500 fits the 15-point batch well."""
        xs, ys = sphere_batch()
        net = make_net(widths=(2, 500, 1), seed=2)
        trace = train(net, (xs, ys), TrainConfig(eta=0.1, steps=10_000))
        out, _ = forward_batch(trace.network, xs)
        mse = np.mean((out - ys) ** 2)
        assert mse <= 1e-3
        assert np.all(trace.losses >= 0)

    def test_divergence_aborts_with_partial_trace(self):
        xs, ys = sphere_batch()
        with pytest.raises(NonFiniteLoss) as err:
            train(make_net(widths=(2, 32, 1)), (xs, ys), TrainConfig(eta=50.0, steps=200))
        partial = err.value.losses
        assert partial.shape[0] == 1
        assert 1 <= partial.shape[1] <= 201
        assert np.isfinite(partial[0, 0])

    def test_sign_activation_needs_surrogate_rule(self):
        xs, ys = sphere_batch()
        cfg = NetworkConfig(
            widths=(2, 32, 1), sigma_w=1.0, sigma_b=0.1, activation=make_sign(), seed=0
        )
        with pytest.raises(MissingSurrogate):
            train(init(cfg), (xs, ys), TrainConfig(eta=0.1, steps=1))

    def test_sign_net_trains_under_surrogate_rule(self):
        """Long surrogate-rule run on a sign net drives the loss down."""
        xs, ys = sphere_batch()
        cfg = NetworkConfig(
            widths=(2, 64, 1), sigma_w=1.0, sigma_b=0.1, activation=make_sign(), seed=9
        )
        trace = train(
            init(cfg),
            (xs, ys),
            TrainConfig(
                eta=0.1,
                steps=30_000,
                rule="surrogate-gradient",
                surrogate=surrogate_erf_deriv(),
            ),
        )
        assert trace.losses[-1] < 0.01 * trace.losses[0]

    def test_dimension_checks(self):
        xs, ys = sphere_batch()
        with pytest.raises(DimensionMismatch):
            train(make_net(), (xs, ys[:-1]), TrainConfig(eta=0.1, steps=1))
        with pytest.raises(DimensionMismatch):
            train(make_net(), (xs, np.hstack([ys, ys])), TrainConfig(eta=0.1, steps=1))


class TestEnsemble:
    def test_members_match_standalone_initialization(self):
        cfg = NetworkConfig(
            widths=(2, 8, 1), sigma_w=1.0, sigma_b=0.1, activation=make_erf_m(2.0), seed=11
        )
        ens = init_ensemble(cfg, 3)
        for i in range(3):
            solo = init(member_config(cfg, i))
            got = member_network(ens, i)
            for w1, w2 in zip(solo.weights, got.weights):
                np.testing.assert_array_equal(w1, w2)
            for b1, b2 in zip(solo.biases, got.biases):
                np.testing.assert_array_equal(b1, b2)

    def test_batched_training_matches_member_by_member(self):
        """One stacked run equals independent runs, member for member."""
        xs, ys = sphere_batch()
        cfg = NetworkConfig(
            widths=(2, 12, 12, 1),
            sigma_w=1.0,
            sigma_b=0.1,
            activation=make_erf_m(2.0),
            seed=11,
        )
        ens = init_ensemble(cfg, 4)
        solos = [member_network(ens, i) for i in range(4)]
        tc = TrainConfig(eta=0.1, steps=30)
        result = train_ensemble(ens, (xs, ys), tc)
        for i, solo in enumerate(solos):
            trace = train(solo, (xs, ys), tc)
            np.testing.assert_array_equal(trace.losses, result.losses[i])
            for w1, w2 in zip(trace.network.weights, result.state.weights):
                np.testing.assert_array_equal(w1, w2[i])

    def test_ensemble_outputs_shape(self):
        cfg = NetworkConfig(
            widths=(2, 8, 3), sigma_w=1.0, sigma_b=0.1, activation=make_erf_m(2.0), seed=1
        )
        ens = init_ensemble(cfg, 5)
        grid = np.random.default_rng(0).normal(size=(7, 2))
        assert ensemble_outputs(ens, grid).shape == (5, 7, 3)

    def test_kappa_rescales_initial_outputs(self):
        cfg = NetworkConfig(
            widths=(2, 16, 1), sigma_w=1.0, sigma_b=0.1, activation=make_erf_m(2.0), seed=6
        )
        grid = np.random.default_rng(2).normal(size=(9, 2))
        base = ensemble_outputs(init_ensemble(cfg, 3), grid)
        from dataclasses import replace

        shrunk = ensemble_outputs(init_ensemble(replace(cfg, kappa=0.2), 3), grid)
        np.testing.assert_allclose(shrunk, 0.2 * base, rtol=1e-12)

    def test_count_validated(self):
        cfg = NetworkConfig(
            widths=(2, 4, 1), sigma_w=1.0, sigma_b=0.1, activation=make_erf_m(2.0), seed=0
        )
        with pytest.raises(InvalidScale):
            init_ensemble(cfg, 0)
        ens = init_ensemble(cfg, 2)
        with pytest.raises(PreconditionViolated):
            member_network(ens, 2)


class TestKernelDrift:
    def test_trace_without_samples_rejected(self):
        xs, ys = sphere_batch()
        trace = train(make_net(), (xs, ys), TrainConfig(eta=0.1, steps=3))
        with pytest.raises(PreconditionViolated):
            kernel_drift(trace)

    def test_schedule_covers_both_endpoints(self):
        xs, ys = sphere_batch()
        trace = train(
            make_net(), (xs, ys), TrainConfig(eta=0.1, steps=25, record_kernel_every=10)
        )
        assert trace.kernel_steps == [0, 10, 20, 25]
        assert len(trace.kernel_grams) == 4

    def test_drift_starts_at_zero_and_matches_manual_norms(self):
        xs, ys = sphere_batch()
        trace = train(
            make_net(seed=3),
            (xs, ys),
            TrainConfig(eta=0.1, steps=40, record_kernel_every=20),
        )
        series = kernel_drift(trace)
        assert series.from_start[0] == 0.0
        manual = [
            np.linalg.norm(g - trace.kernel_grams[0]) for g in trace.kernel_grams
        ]
        np.testing.assert_allclose(series.from_start, manual, rtol=1e-15)

    def test_zero_steps_gives_zero_drift(self):
        xs, ys = sphere_batch()
        trace = train(
            make_net(), (xs, ys), TrainConfig(eta=0.1, steps=0, record_kernel_every=1)
        )
        series = kernel_drift(trace)
        np.testing.assert_array_equal(series.from_start, [0.0])

    def test_network_sequence_route_with_analytic_reference(self):
        xs, ys = sphere_batch(count=6)
        nets = [make_net(widths=(2, 8, 1), seed=s) for s in (0, 1)]
        reference = np.eye(6)
        series = kernel_drift(nets, points=xs, analytic=reference)
        assert isinstance(series, DriftSeries)
        grams = [kernel_gram(n, None, None, xs).matrix() for n in nets]
        np.testing.assert_allclose(
            series.from_analytic,
            [np.linalg.norm(g - reference) for g in grams],
            rtol=1e-15,
        )
        assert series.from_start[0] == 0.0

    def test_network_sequence_needs_points(self):
        nets = [make_net(widths=(2, 8, 1))]
        with pytest.raises(PreconditionViolated):
            kernel_drift(nets)

    def test_max_drift_decreases_with_width(self):
        """Wider nets move their empirical kernel less during training."""
        xs, ys = sphere_batch()
        sups = []
        for width in (50, 200, 800):
            cfg = NetworkConfig(
                widths=(2, width, 1),
                sigma_w=1.0,
                sigma_b=0.1,
                activation=make_erf_m(2.0),
                seed=4,
            )
            trace = train(
                init(cfg),
                (xs, ys),
                TrainConfig(
                    eta=0.1,
                    steps=400,
                    rule="surrogate-gradient",
                    surrogate=parse_surrogate("derf"),
                    record_kernel_every=100,
                ),
            )
            sups.append(kernel_drift(trace).from_start.max())
        assert sups[0] > sups[1] > sups[2]
