"""Tests for bivariate-Gaussian expectation routes.

Frozen reference values below were produced by the Monte-Carlo oracle at 1e7
samples and agree with the closed forms within 1.4 standard errors.
"""

import math

import numpy as np
import pytest
from scipy.special import erf

from sgntk.dual_expectations import (
    Cov2,
    gauss_expect_1d,
    gh_expect,
    mc_expect,
    mean_erf_deriv,
    t_erf,
    t_erf_m,
    t_erf_mm,
    tdot_erf,
    tdot_erf_m,
    tdot_erf_mm,
)
from sgntk.errors import InvalidCov, InvalidScale, PreconditionViolated


def derf(z):
    return 2.0 / math.sqrt(math.pi) * np.exp(-np.asarray(z, dtype=float) ** 2)


def derf_m(m):
    def fn(z):
        z = np.asarray(z, dtype=float)
        return 2.0 * m / math.sqrt(math.pi) * np.exp(-((m * z) ** 2))

    return fn


class TestCov2:
    def test_accepts_valid(self):
        c = Cov2(2.0, 1.0, 0.3)
        assert c.invertible
        np.testing.assert_allclose(c.det, 2.0 - 0.09)

    def test_singular_allowed(self):
        c = Cov2(1.0, 1.0, 1.0)
        assert not c.invertible
        assert c.det == 0.0

    def test_tiny_negative_det_clamped(self):
        c = Cov2(1.0, 1.0, 1.0 + 1e-14)
        assert c.det == 0.0

    def test_rejects_negative_variance(self):
        with pytest.raises(InvalidCov):
            Cov2(-1.0, 1.0, 0.0)

    def test_rejects_badly_indefinite(self):
        with pytest.raises(InvalidCov):
            Cov2(1.0, 1.0, 2.0)


class TestClosedForms:
    def test_t_erf_independence(self):
        assert t_erf(Cov2(1.0, 3.0, 0.0)) == 0.0

    def test_t_erf_diagonal_unit(self):
        c = Cov2(1.0, 1.0, 1.0)
        want = 2.0 / math.pi * math.asin(2.0 / 3.0)
        np.testing.assert_allclose(t_erf(c), want, rtol=1e-15)
        np.testing.assert_allclose(t_erf(c), 0.4645590544, atol=1e-10)

    def test_t_erf_half_correlation(self):
        c = Cov2(1.0, 1.0, 0.5)
        np.testing.assert_allclose(t_erf(c), 2.0 / math.pi * math.asin(1.0 / 3.0), rtol=1e-15)
        np.testing.assert_allclose(t_erf(c), 0.2163468959, atol=1e-10)

    def test_t_erf_range(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            s11, s22 = rng.uniform(0.01, 5, 2)
            s12 = rng.uniform(-1, 1) * math.sqrt(s11 * s22)
            assert -1.0 <= t_erf(Cov2(s11, s22, s12)) <= 1.0

    def test_t_erf_monotone_in_s12(self):
        vals = [t_erf(Cov2(1.2, 0.8, r)) for r in np.linspace(-0.9, 0.9, 19)]
        assert np.all(np.diff(vals) > 0)

    def test_tdot_erf_identity(self):
        np.testing.assert_allclose(tdot_erf(Cov2(1.0, 1.0, 0.0)), 4.0 / (3.0 * math.pi), rtol=1e-15)

    def test_tdot_erf_singular(self):
        np.testing.assert_allclose(
            tdot_erf(Cov2(1.0, 1.0, 1.0)), 4.0 / (math.pi * math.sqrt(5.0)), rtol=1e-15
        )

    def test_t_erf_m_is_scaled_t_erf(self):
        c = Cov2(0.7, 1.1, -0.4)
        np.testing.assert_allclose(t_erf_m(c, 2.0), t_erf(c.scaled(4.0)), rtol=1e-15)

    def test_t_erf_m_saturates(self):
        assert abs(t_erf_m(Cov2(1.0, 1.0, 1.0), 1e8) - 1.0) < 1e-6

    def test_tdot_erf_m_singular_diagonal(self):
        got = tdot_erf_m(Cov2(1.0, 1.0, 1.0), 1.0)
        np.testing.assert_allclose(got, 2.0 / math.pi / math.sqrt(1.25), rtol=1e-15)
        np.testing.assert_allclose(got, 0.5694100347, atol=1e-10)

    def test_tdot_erf_m_diagonal_grows_linearly(self):
        s = 0.51
        for m in [64.0, 512.0]:
            got = tdot_erf_m(Cov2(s, s, s), m)
            asym = 2.0 / math.pi * m / math.sqrt(s)
            assert abs(got / asym - 1.0) < 1.0 / m

    def test_tdot_erf_m_limit_invertible(self):
        c = Cov2(1.0, 1.0, 0.5)
        want = 2.0 / math.pi / math.sqrt(c.det)
        np.testing.assert_allclose(tdot_erf_m(c, 1e7), want, rtol=1e-6)

    def test_bad_slope(self):
        with pytest.raises(InvalidScale):
            t_erf_m(Cov2(1, 1, 0), 0.0)

    def test_mixed_slopes_reduce_to_equal_slopes(self):
        c = Cov2(0.8, 1.2, -0.4)
        assert t_erf_mm(c, 2.0, 2.0) == t_erf_m(c, 2.0)
        assert tdot_erf_mm(c, 2.0, 2.0) == tdot_erf_m(c, 2.0)

    def test_mixed_slopes_match_quadrature(self):
        c = Cov2(0.8, 1.2, -0.4)
        e5 = lambda z: erf(5.0 * np.asarray(z, dtype=float))
        e2 = lambda z: erf(2.0 * np.asarray(z, dtype=float))
        got = gh_expect(c, e2, e5, order=256)
        np.testing.assert_allclose(t_erf_mm(c, 2.0, 5.0), got, atol=1e-9)
        got_dot = gh_expect(c, derf_m(2.0), derf_m(5.0), order=256)
        np.testing.assert_allclose(tdot_erf_mm(c, 2.0, 5.0), got_dot, atol=1e-8)

    def test_mean_erf_deriv_matches_1d_quadrature(self):
        for v in [0.0, 0.2, 1.7]:
            np.testing.assert_allclose(
                mean_erf_deriv(v), gauss_expect_1d(derf, v), atol=1e-12
            )

    def test_gauss_expect_1d_zero_variance(self):
        np.testing.assert_allclose(gauss_expect_1d(derf, 0.0), derf(0.0), rtol=1e-12)


class TestQuadrature:
    def test_identity_integrands_recover_s12(self):
        c = Cov2(2.0, 1.0, 0.3)
        ident = lambda z: np.asarray(z, dtype=float)
        np.testing.assert_allclose(gh_expect(c, ident, ident), 0.3, atol=1e-10)

    def test_matches_t_erf(self):
        c = Cov2(1.0, 1.0, 0.5)
        assert abs(gh_expect(c, erf, erf, order=64) - t_erf(c)) <= 1e-8

    def test_matches_tdot_erf(self):
        c = Cov2(2.0, 1.0, 0.3)
        assert abs(gh_expect(c, derf, derf, order=64) - tdot_erf(c)) <= 1e-8

    def test_matches_scaled_forms(self):
        """Steeper integrands converge too, at higher order."""
        c = Cov2(0.6, 0.9, 0.2)
        e3 = lambda z: erf(3.0 * np.asarray(z, dtype=float))
        assert abs(gh_expect(c, e3, e3, order=192) - t_erf_m(c, 3.0)) <= 1e-10
        assert abs(gh_expect(c, derf_m(3.0), derf_m(3.0), order=192) - tdot_erf_m(c, 3.0)) <= 1e-10

    def test_order_convergence(self):
        c = Cov2(1.3, 0.8, -0.5)
        for g1, g2 in [(erf, erf), (derf, derf)]:
            gap = abs(gh_expect(c, g1, g2, order=128) - gh_expect(c, g1, g2, order=64))
            assert gap <= 1e-9

    def test_singular_covariance_handled(self):
        c = Cov2(1.0, 1.0, 1.0)
        assert abs(gh_expect(c, erf, erf) - t_erf(c)) <= 1e-7

    def test_degenerate_variance(self):
        c = Cov2(0.0, 1.0, 0.0)
        got = gh_expect(c, lambda z: np.ones_like(np.asarray(z, dtype=float)), erf)
        np.testing.assert_allclose(got, 0.0, atol=1e-12)

    def test_order_bounds(self):
        c = Cov2(1.0, 1.0, 0.0)
        with pytest.raises(PreconditionViolated):
            gh_expect(c, erf, erf, order=4)
        with pytest.raises(PreconditionViolated):
            gh_expect(c, erf, erf, order=512)


class TestMonteCarlo:
    def test_identity_recovers_s12(self):
        c = Cov2(1.0, 1.0, 0.4)
        ident = lambda z: np.asarray(z, dtype=float)
        est, se = mc_expect(c, ident, ident, 200_000, seed=0)
        assert abs(est - 0.4) < 4 * se

    def test_erf_pair_matches_closed_form(self):
        c = Cov2(1.0, 1.0, 0.5)
        est, se = mc_expect(c, erf, erf, 1_000_000, seed=1)
        assert abs(est - t_erf(c)) < 4 * se

    def test_sign_pair_matches_arcsin(self):
        c = Cov2(1.0, 1.0, 0.5)
        est, se = mc_expect(c, np.sign, np.sign, 1_000_000, seed=2)
        want = 2.0 / math.pi * math.asin(0.5)
        assert abs(est - want) < 4 * se
        # The steep-slope erf closed form reproduces the same limit.
        assert abs(t_erf_m(c, 1e6) - want) < 1e-9

    def test_deterministic_given_seed(self):
        c = Cov2(1.0, 1.0, 0.2)
        a = mc_expect(c, erf, erf, 1000, seed=9)
        b = mc_expect(c, erf, erf, 1000, seed=9)
        assert a == b
