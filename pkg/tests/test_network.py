"""Tests for network initialization, forward pass and ensembles."""

import math

import numpy as np
import pytest

from sgntk.activations import make_erf_m, make_sign
from sgntk.errors import DimensionMismatch, InvalidScale
from sgntk.network import (
    NetworkConfig,
    ensemble_statistics,
    forward,
    forward_batch,
    from_bytes,
    from_json,
    init,
    to_bytes,
    to_json,
)


def small_config(seed=0, **overrides):
    base = dict(
        widths=(2, 8, 1),
        sigma_w=1.0,
        sigma_b=0.1,
        activation=make_erf_m(2.0),
        seed=seed,
    )
    base.update(overrides)
    return NetworkConfig(**base)


class TestConfig:
    def test_param_count(self):
        cfg = small_config()
        # 8*(2+1) + 1*(8+1)
        assert cfg.param_count == 33
        assert cfg.depth == 2

    def test_validation(self):
        with pytest.raises(InvalidScale):
            small_config(widths=(2,))
        with pytest.raises(InvalidScale):
            small_config(sigma_w=0.0)
        with pytest.raises(InvalidScale):
            small_config(kappa=0.0)
        with pytest.raises(InvalidScale):
            small_config(kappa=1.5)


class TestInit:
    def test_deterministic(self):
        a = init(small_config(seed=5))
        b = init(small_config(seed=5))
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)
        for ba, bb in zip(a.biases, b.biases):
            np.testing.assert_array_equal(ba, bb)

    def test_seed_changes_parameters(self):
        a = init(small_config(seed=5))
        b = init(small_config(seed=6))
        assert not np.array_equal(a.weights[0], b.weights[0])

    def test_entry_statistics(self):
        cfg = small_config(widths=(100, 100, 1), seed=11)
        net = init(cfg)
        w = net.weights[0].ravel()
        se = 1.0 / math.sqrt(w.size)
        assert abs(w.mean()) < 4 * se
        assert abs(w.var() - 1.0) < 4 * math.sqrt(2.0) * se

    def test_kappa_scales_last_layer(self):
        cfg = small_config(widths=(2, 2048, 1), kappa=0.2, seed=3)
        net = init(cfg)
        last = np.concatenate([net.weights[-1].ravel(), net.biases[-1]])
        assert abs(last.std() - 0.2) < 0.02
        hidden = net.weights[0].ravel()
        assert abs(hidden.std() - 1.0) < 0.05


class TestForward:
    def test_zero_input_zero_bias(self):
        cfg = small_config(sigma_b=0.0)
        net = init(cfg)
        out, _ = forward(net, np.zeros(2))
        np.testing.assert_allclose(out, 0.0, atol=1e-15)

    def test_single_layer_definition(self):
        cfg = small_config(widths=(3, 2))
        net = init(cfg)
        x = np.array([0.3, -1.2, 0.5])
        out, preacts = forward(net, x)
        want = cfg.sigma_w / math.sqrt(3) * (net.weights[0] @ x) + cfg.sigma_b * net.biases[0]
        np.testing.assert_allclose(out, want, rtol=1e-15)
        assert len(preacts) == 1

    def test_hand_computed_two_layer(self):
        """Forward pass against scalar arithmetic on hand-set parameters."""
        cfg = NetworkConfig(
            widths=(1, 2, 1), sigma_w=1.5, sigma_b=0.5,
            activation=make_erf_m(1.0), seed=0,
        )
        net = init(cfg)
        net.weights[0] = np.array([[2.0], [-1.0]])
        net.biases[0] = np.array([0.3, -0.2])
        net.weights[1] = np.array([[0.5, 1.5]])
        net.biases[1] = np.array([0.7])
        x = np.array([0.4])
        out, preacts = forward(net, x)
        h11 = 1.5 * 2.0 * 0.4 + 0.5 * 0.3
        h12 = 1.5 * (-1.0) * 0.4 + 0.5 * (-0.2)
        np.testing.assert_allclose(preacts[0], [h11, h12], rtol=1e-15)
        want = 1.5 / math.sqrt(2) * (0.5 * math.erf(h11) + 1.5 * math.erf(h12)) + 0.5 * 0.7
        np.testing.assert_allclose(out[0], want, rtol=1e-15)

    def test_no_activation_after_last_layer(self):
        """Outputs can leave [-1, 1], so the last preactivation is returned raw."""
        cfg = small_config(widths=(2, 4, 1), sigma_w=3.0, sigma_b=2.0, seed=8)
        net = init(cfg)
        outs, _ = forward_batch(net, np.random.default_rng(0).normal(size=(64, 2)) * 3)
        assert np.max(np.abs(outs)) > 1.0

    def test_batch_matches_single(self):
        net = init(small_config())
        xs = np.random.default_rng(1).normal(size=(5, 2))
        batch, _ = forward_batch(net, xs)
        for i, x in enumerate(xs):
            single, _ = forward(net, x)
            np.testing.assert_allclose(batch[i], single, rtol=1e-12)

    def test_dimension_mismatch(self):
        net = init(small_config())
        with pytest.raises(DimensionMismatch):
            forward(net, np.zeros(3))

    def test_kappa_scales_output_exactly(self):
        base = init(small_config(seed=4))
        scaled = init(small_config(seed=4, kappa=0.25))
        x = np.array([0.5, -0.3])
        out_base, _ = forward(base, x)
        out_scaled, _ = forward(scaled, x)
        np.testing.assert_allclose(out_scaled, 0.25 * out_base, rtol=1e-12)


class TestEnsembleStatistics:
    def test_mean_near_zero(self):
        cfg = small_config(widths=(2, 64, 1), seed=100)
        pts = np.array([[1.0, 0.0], [0.0, 1.0]])
        stats = ensemble_statistics(cfg, 2000, pts)
        sd = np.sqrt(np.diagonal(stats.cov[0]))
        se = sd / math.sqrt(stats.count)
        assert np.all(np.abs(stats.mean[:, 0]) < 4 * se)

    def test_paired_mode_same_activation_identical(self):
        cfg = small_config(seed=7)
        pts = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
        stats = ensemble_statistics(cfg, 16, pts, activation2=cfg.activation)
        np.testing.assert_allclose(stats.mean2, stats.mean, rtol=1e-15)

    def test_sign_activation_supported(self):
        cfg = small_config(activation=make_sign(), seed=2)
        stats = ensemble_statistics(cfg, 8, np.array([[1.0, 0.0]]))
        assert np.all(np.isfinite(stats.cov))

    def test_count_validation(self):
        with pytest.raises(InvalidScale):
            ensemble_statistics(small_config(), 1, np.array([[1.0, 0.0]]))


class TestSerialization:
    def test_json_round_trip(self):
        net = init(small_config(seed=13))
        back = from_json(to_json(net))
        assert back.config.widths == net.config.widths
        for wa, wb in zip(net.weights, back.weights):
            np.testing.assert_array_equal(wa, wb)
        out1, _ = forward(net, np.array([0.2, -0.4]))
        out2, _ = forward(back, np.array([0.2, -0.4]))
        np.testing.assert_array_equal(out1, out2)

    def test_bytes_round_trip(self):
        net = init(small_config(seed=14, kappa=0.5))
        back = from_bytes(to_bytes(net))
        assert back.config.kappa == 0.5
        for ba, bb in zip(net.biases, back.biases):
            np.testing.assert_array_equal(ba, bb)
