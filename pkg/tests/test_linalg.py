"""Tests for the dense linear algebra layer."""

import numpy as np
import pytest

from sgntk.errors import DimensionMismatch, NonFinite, NotPositiveDefinite, PreconditionViolated
from sgntk.linalg import SymEig, eig_sym, jitter_ladder, matrix_exp, solve_general, solve_spd


def random_spd(rng, n, spread=3.0):
    """Random SPD matrix with eigenvalues spread over a few decades."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = 10.0 ** rng.uniform(-spread / 2, spread / 2, size=n)
    return (q * lam) @ q.T


def expm_repeated_squaring(m, levels=10, terms=30):
    """Independent oracle: high-order series at m / 2**levels, then square back up."""
    small = m / float(2**levels)
    acc = np.eye(m.shape[0])
    term = np.eye(m.shape[0])
    for k in range(1, terms + 1):
        term = term @ small / k
        acc = acc + term
    for _ in range(levels):
        acc = acc @ acc
    return acc


class TestSolveSpd:
    def test_identity(self):
        b = np.array([1.0, -2.0, 3.0])
        np.testing.assert_allclose(solve_spd(np.eye(3), b), b)

    def test_diagonal(self):
        a = np.diag([2.0, 4.0])
        np.testing.assert_allclose(solve_spd(a, np.array([2.0, 4.0])), [1.0, 1.0])

    def test_multiply_back_residual(self):
        rng = np.random.default_rng(7)
        a = random_spd(rng, 15)
        b = rng.standard_normal((15, 4))
        x = solve_spd(a, b)
        resid = np.linalg.norm(a @ x - b)
        assert resid <= 1e-8 * np.linalg.norm(b)

    def test_many_random_instances(self):
        """Residual bound holds across many sizes and conditionings."""
        rng = np.random.default_rng(123)
        for trial in range(1000):
            n = int(rng.integers(1, 33))
            a = random_spd(rng, n)
            b = rng.standard_normal(n)
            x = solve_spd(a, b)
            assert np.linalg.norm(a @ x - b) <= 1e-8 * max(np.linalg.norm(b), 1e-30)

    def test_near_singular_uses_jitter(self):
        # Gram of nearly duplicate vectors: exactly rank-deficient to float eyes.
        v = np.array([1.0, 2.0, 3.0])
        pts = np.stack([v, v * (1 + 1e-16), v * 2])
        gram = pts @ pts.T
        y = np.array([1.0, 1.0, 2.0])
        x = solve_spd(gram, y)
        assert np.all(np.isfinite(x))

    def test_indefinite_raises(self):
        with pytest.raises(NotPositiveDefinite):
            solve_spd(np.diag([1.0, -1.0]), np.ones(2))

    def test_asymmetric_raises(self):
        with pytest.raises(PreconditionViolated):
            solve_spd(np.array([[1.0, 0.5], [0.0, 1.0]]), np.ones(2))

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionMismatch):
            solve_spd(np.eye(3), np.ones(2))

    def test_jitter_ladder_range(self):
        a = np.eye(4) * 2.0  # trace/n == 2
        ladder = jitter_ladder(a)
        assert ladder[0] == 0.0
        np.testing.assert_allclose(ladder[1], 2e-12)
        np.testing.assert_allclose(ladder[-1], 2e-6)


class TestSolveGeneral:
    def test_asymmetric_system(self):
        a = np.array([[2.0, 1.0], [0.5, -3.0]])
        b = np.array([1.0, 2.0])
        x = solve_general(a, b)
        np.testing.assert_allclose(a @ x, b, atol=1e-12)

    def test_random_systems(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(2, 20))
            a = rng.standard_normal((n, n))
            b = rng.standard_normal(n)
            x = solve_general(a, b)
            np.testing.assert_allclose(a @ x, b, atol=1e-8 * max(1.0, np.abs(b).max()))


class TestEigSym:
    def test_diagonal_input(self):
        ee = eig_sym(np.diag([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(ee.eigenvalues, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(np.abs(ee.eigenvectors), np.eye(3), atol=1e-12)

    def test_known_two_by_two(self):
        ee = eig_sym(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(ee.eigenvalues, [-1.0, 1.0], atol=1e-12)

    def test_reconstruction_and_orthogonality(self):
        rng = np.random.default_rng(42)
        a = rng.standard_normal((10, 10))
        a = a + a.T
        ee = eig_sym(a)
        rebuilt = (ee.eigenvectors * ee.eigenvalues) @ ee.eigenvectors.T
        assert np.linalg.norm(rebuilt - a) <= 1e-8 * np.linalg.norm(a)
        q = ee.eigenvectors
        assert np.linalg.norm(q.T @ q - np.eye(10)) <= 1e-8

    def test_ascending_order(self):
        rng = np.random.default_rng(9)
        a = rng.standard_normal((8, 8))
        a = a + a.T
        ee = eig_sym(a)
        assert isinstance(ee, SymEig)
        assert np.all(np.diff(ee.eigenvalues) >= 0)


class TestMatrixExp:
    def test_zero_matrix(self):
        np.testing.assert_allclose(matrix_exp(np.zeros((3, 3)), 1.0), np.eye(3))

    def test_diagonal(self):
        out = matrix_exp(np.diag([1.0, -1.0]), 1.0)
        np.testing.assert_allclose(out, np.diag([np.e, 1.0 / np.e]), rtol=1e-12)

    def test_random_vs_repeated_squaring(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((8, 8))
        want = expm_repeated_squaring(0.7 * a)
        got = matrix_exp(a, 0.7)
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-10)

    def test_symmetric_vs_repeated_squaring(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((6, 6))
        a = a + a.T
        want = expm_repeated_squaring(-0.3 * a)
        got = matrix_exp(a, -0.3)
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-10)

    def test_semigroup_property(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((5, 5))
        lhs = matrix_exp(a, 0.9)
        rhs = matrix_exp(a, 0.4) @ matrix_exp(a, 0.5)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-7)

    def test_overflow_reports_non_finite(self):
        with pytest.raises(NonFinite):
            matrix_exp(np.diag([1000.0]), 1.0)

    def test_nan_input_rejected(self):
        with pytest.raises(NonFinite):
            matrix_exp(np.array([[np.nan]]), 1.0)
