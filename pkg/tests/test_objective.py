from unittest import TestCase

import numpy as np
from hypothesis import given, settings, strategies

import dcopt
from dcopt.exceptions import DimensionMismatch, NonPSD, RegimeMismatch
from dcopt.test_utils import finite_difference_gradient


def _random_psd(rng, d, rank=None):
    a = rng.standard_normal((d, rank or d))
    return a @ a.T


class TestLogistic(TestCase):
    def test_single_sample(self):
        f = dcopt.logistic_local([[1.0, 0.0]], [1.0])
        self.assertAlmostEqual(f.value(np.zeros(2)), np.log(2))
        np.testing.assert_allclose(f.gradient(np.zeros(2)), [-0.5, 0.0])
        self.assertAlmostEqual(f.smoothness, 0.25)

    def test_value_decreases_along_margin(self):
        f = dcopt.logistic_local([[1.0, 2.0]], [1.0])
        values = [f.value(s * np.array([1.0, 2.0])) for s in (0, 1, 10, 100, 1000)]
        self.assertTrue(np.all(np.diff(values) < 0))
        self.assertTrue(np.isfinite(f.value(-1000 * np.array([1.0, 2.0]))))
        self.assertLess(values[-1], 1e-300)

    def test_finite_differences(self):
        rng = np.random.default_rng(0)
        f = dcopt.logistic_local(rng.standard_normal((5, 3)), rng.choice([-1.0, 1.0], 5))
        for _ in range(5):
            v = rng.standard_normal(3)
            np.testing.assert_allclose(f.gradient(v), finite_difference_gradient(f.value, v),
                                       atol=1e-6)

    def test_smoothness_constant(self):
        rng = np.random.default_rng(1)
        features = rng.standard_normal((20, 4))
        f = dcopt.logistic_local(features, rng.choice([-1.0, 1.0], 20))
        self.assertAlmostEqual(f.smoothness,
                               np.max(np.linalg.eigvalsh(features.T @ features)) / 80)
        for _ in range(20):
            u, v = rng.standard_normal((2, 4))
            self.assertLessEqual(np.linalg.norm(f.gradient(u) - f.gradient(v)),
                                 f.smoothness * np.linalg.norm(u - v) * (1 + 1e-12))

    def test_from_dataset_shard(self):
        shard = dcopt.synth_logistic(3, 8, 4, seed=5)[1]
        f = dcopt.logistic_local(shard)
        g = dcopt.logistic_local(shard.features, shard.labels)
        self.assertEqual((f.n, f.dim), (8, 4))
        self.assertEqual(f.smoothness, g.smoothness)
        v = np.linspace(-1, 1, 4)
        self.assertEqual(f.value(v), g.value(v))

    def test_wrong_input(self):
        f = dcopt.logistic_local([[1.0, 0.0]], [1.0])
        with self.assertRaises(DimensionMismatch):
            f.gradient(np.zeros(3))
        with self.assertRaises(DimensionMismatch):
            dcopt.logistic_local(np.ones((2, 2)), [1.0])


class TestQuadratic(TestCase):
    def test_identity(self):
        f = dcopt.quadratic_local(np.eye(2), np.zeros(2))
        self.assertAlmostEqual(f.value([3.0, 4.0]), 12.5)
        np.testing.assert_allclose(f.gradient([3.0, 4.0]), [3.0, 4.0])
        self.assertEqual(f.smoothness, 1.0)
        self.assertEqual(f.strong_convexity, 1.0)

    def test_zero(self):
        f = dcopt.quadratic_local(np.zeros((2, 2)), np.array([1.0, -2.0]))
        np.testing.assert_allclose(f.gradient([5.0, 6.0]), [-1.0, 2.0])

    def test_finite_differences(self):
        rng = np.random.default_rng(2)
        f = dcopt.quadratic_local(_random_psd(rng, 4), rng.standard_normal(4))
        v = rng.standard_normal(4)
        np.testing.assert_allclose(f.gradient(v), finite_difference_gradient(f.value, v),
                                   atol=1e-6)

    def test_not_psd(self):
        with self.assertRaises(NonPSD):
            dcopt.quadratic_local(np.diag([1.0, -1.0]), np.zeros(2))
        with self.assertRaises(NonPSD):
            dcopt.quadratic_local(np.array([[1.0, 1.0], [0.0, 1.0]]), np.zeros(2))
        with self.assertRaises(DimensionMismatch):
            dcopt.quadratic_local(np.eye(2), np.zeros(3))

    def test_random_locals(self):
        locals_ = dcopt.random_quadratic_locals(5, 6, 100.0, seed=3, strong_convexity=0.5)
        self.assertEqual(len(locals_), 5)
        self.assertAlmostEqual(max(f.smoothness for f in locals_), 100.0, places=9)
        for f in locals_:
            self.assertAlmostEqual(f.strong_convexity, 0.5, places=9)
        again = dcopt.random_quadratic_locals(5, 6, 100.0, seed=3, strong_convexity=0.5)
        np.testing.assert_array_equal(locals_[2].q, again[2].q)

    def test_shifted(self):
        f = dcopt.quadratic_local(np.diag([2.0, 5.0]), np.array([1.0, 1.0]))
        shifted = dcopt.ShiftedLocal(f, -2.0)
        self.assertAlmostEqual(shifted.smoothness, 3.0)
        self.assertAlmostEqual(shifted.strong_convexity, 0.0)
        v = np.array([0.3, -0.7])
        np.testing.assert_allclose(shifted.gradient(v), f.gradient(v) - 2 * v)
        self.assertAlmostEqual(shifted.value(v), f.value(v) - v @ v)
        with self.assertRaises(ValueError):
            dcopt.ShiftedLocal(f, -3.0)

    def test_convexity_and_smoothness(self):
        rng = np.random.default_rng(4)
        for f in dcopt.random_quadratic_locals(3, 4, 10.0, seed=4):
            for _ in range(10):
                x, y = rng.standard_normal((2, 4))
                linear = f.value(x) + f.gradient(x) @ (y - x)
                self.assertGreaterEqual(f.value(y), linear - 1e-9)
                self.assertLessEqual(f.value(y),
                                     linear + f.smoothness / 2 * np.sum((x - y) ** 2) + 1e-9)


class TestRegularizers(TestCase):
    def test_soft_threshold(self):
        np.testing.assert_allclose(dcopt.soft_threshold([1.2, -0.3, -2.0, 0.5], 0.5),
                                   [0.7, 0.0, -1.5, 0.0])
        np.testing.assert_allclose(dcopt.soft_threshold(np.ones((2, 3)), 0.25),
                                   0.75 * np.ones((2, 3)))

    def test_elastic_net_prox(self):
        self.assertAlmostEqual(float(dcopt.elastic_net(1, 0).prox(0.5, np.array([1.2]))[0]), 0.7)
        self.assertEqual(float(dcopt.elastic_net(1, 0).prox(0.5, np.array([-0.3]))[0]), 0)
        self.assertAlmostEqual(float(dcopt.elastic_net(0.5, 1).prox(1, np.array([2.0]))[0]), 0.75)

    def test_elastic_net_value(self):
        g = dcopt.elastic_net(2.0, 4.0)
        self.assertAlmostEqual(g.value(np.array([1.0, -1.0])), 4 + 4)
        self.assertEqual(g.mu, 4.0)
        with self.assertRaises(ValueError):
            dcopt.elastic_net(-1, 0)
        with self.assertRaises(ValueError):
            g.prox(0, np.zeros(2))

    def test_zero_regularizer(self):
        v = np.array([0.1, -3.0])
        np.testing.assert_array_equal(dcopt.zero_regularizer().prox(10.0, v), v)

    def test_ridge_augmented(self):
        rng = np.random.default_rng(5)
        v = rng.standard_normal(6)
        augmented = dcopt.RidgeAugmented(dcopt.elastic_net(0.3, 0.0), 2.0)
        self.assertEqual(augmented.mu, 2.0)
        np.testing.assert_allclose(augmented.prox(0.7, v),
                                   dcopt.elastic_net(0.3, 2.0).prox(0.7, v), atol=1e-14)
        np.testing.assert_allclose(augmented.prox_rows(0.7, np.vstack([v, -v])),
                                   np.vstack([augmented.prox(0.7, v), augmented.prox(0.7, -v)]),
                                   atol=1e-14)
        self.assertAlmostEqual(augmented.value(v), dcopt.elastic_net(0.3, 2.0).value(v))

    @settings(deadline=None, max_examples=50)
    @given(strategies.integers(0, 2 ** 31),
           strategies.floats(0.0, 2.0),
           strategies.floats(0.0, 2.0),
           strategies.floats(1e-3, 10.0))
    def test_prox_optimality(self, seed, sigma, mu, gamma):
        v = np.random.default_rng(seed).standard_normal(8)
        w = dcopt.elastic_net(sigma, mu).prox(gamma, v)
        nonzero = w != 0
        residual = gamma * sigma * np.sign(w) + gamma * mu * w + (w - v)
        self.assertLess(np.max(np.abs(residual[nonzero]), initial=0.0), 1e-10)
        self.assertTrue(np.all(np.abs(v[~nonzero]) <= gamma * sigma + 1e-10))

    @settings(deadline=None, max_examples=50)
    @given(strategies.integers(0, 2 ** 31), strategies.floats(1e-3, 10.0))
    def test_prox_non_expansive(self, seed, gamma):
        u, v = np.random.default_rng(seed).standard_normal((2, 8))
        g = dcopt.elastic_net(0.5, 0.1)
        self.assertLessEqual(np.linalg.norm(g.prox(gamma, u) - g.prox(gamma, v)),
                             np.linalg.norm(u - v) + 1e-12)

    @settings(deadline=None, max_examples=50)
    @given(strategies.integers(0, 2 ** 31), strategies.floats(1e-3, 10.0))
    def test_prox_of_average(self, seed, gamma):
        """||prox(1 x_bar) - 1 mean(prox(x))|| <= ||Pi x||"""
        x = np.random.default_rng(seed).standard_normal((5, 4))
        g = dcopt.elastic_net(0.5, 0.1)
        averaged = dcopt.aggregate_prox(g, gamma, dcopt.broadcast(dcopt.mean_row(x), 5))
        proxed = dcopt.aggregate_prox(g, gamma, x)
        lhs = np.linalg.norm(averaged - dcopt.broadcast(dcopt.mean_row(proxed), 5))
        self.assertLessEqual(lhs, dcopt.consensus_error(x) + 1e-12)

    def test_strong_convexity(self):
        rng = np.random.default_rng(6)
        g = dcopt.elastic_net(0.5, 0.3)
        for _ in range(20):
            x, y = rng.standard_normal((2, 5))
            for theta in (0.25, 0.5, 0.75):
                lhs = g.value(theta * x + (1 - theta) * y)
                rhs = (theta * g.value(x) + (1 - theta) * g.value(y)
                       - g.mu / 2 * theta * (1 - theta) * np.sum((x - y) ** 2))
                self.assertLessEqual(lhs, rhs + 1e-9)


class TestCompositeProblem(TestCase):
    def setUp(self):
        self.p = dcopt.test_utils.logistic_test_problem()

    def test_attributes(self):
        p = self.p
        self.assertEqual((p.m, p.d), (4, 5))
        self.assertEqual(p.mu, 1e-2)
        self.assertEqual(p.L, max(f.smoothness for f in p.locals))
        v = np.linspace(-1, 1, 5)
        self.assertAlmostEqual(p.value(v), p.smooth_value(v) + p.reg.value(v))

    def test_mu_larger_than_l(self):
        with self.assertRaises(ValueError):
            dcopt.CompositeProblem(dcopt.random_quadratic_locals(2, 3, 1.0, seed=0),
                                   dcopt.elastic_net(0, 5.0))

    def test_mixed_dimensions(self):
        with self.assertRaises(DimensionMismatch):
            dcopt.CompositeProblem([dcopt.quadratic_local(np.eye(2), np.zeros(2)),
                                    dcopt.quadratic_local(np.eye(3), np.zeros(3))],
                                   dcopt.zero_regularizer())

    def test_aggregate_gradient(self):
        ledger = dcopt.GradLedger()
        x = np.random.default_rng(0).standard_normal((4, 5))
        grads = dcopt.aggregate_gradient(self.p, x, ledger)
        self.assertEqual(ledger.evaluations, 4)
        for i, f in enumerate(self.p.locals):
            np.testing.assert_allclose(grads[i], finite_difference_gradient(f.value, x[i]),
                                       atol=1e-6)
        with self.assertRaises(DimensionMismatch):
            dcopt.aggregate_gradient(self.p, np.zeros((3, 5)))

    def test_aggregate_gradient_identity_quadratics(self):
        p = dcopt.CompositeProblem([dcopt.quadratic_local(np.eye(1), np.zeros(1))] * 2,
                                   dcopt.zero_regularizer())
        np.testing.assert_allclose(dcopt.aggregate_gradient(p, [[1.0], [2.0]]), [[1.0], [2.0]])

    def test_aggregate_prox(self):
        np.testing.assert_allclose(
            dcopt.aggregate_prox(dcopt.elastic_net(1, 0), 0.5, [[1.2], [-0.3]]), [[0.7], [0.0]])
        x = np.random.default_rng(1).standard_normal((3, 2))
        np.testing.assert_array_equal(dcopt.aggregate_prox(dcopt.zero_regularizer(), 1.0, x), x)

    def test_bregman(self):
        half_square = dcopt.CompositeProblem([dcopt.quadratic_local(np.eye(1), np.zeros(1))],
                                             dcopt.zero_regularizer())
        self.assertAlmostEqual(dcopt.bregman_df(half_square, np.array([1.0]), [[0.0]]), 0.5)
        y = np.random.default_rng(2).standard_normal(5)
        self.assertAlmostEqual(dcopt.bregman_df(self.p, y, dcopt.broadcast(y, 4)), 0.0)

    @settings(deadline=None, max_examples=30)
    @given(strategies.integers(0, 2 ** 31))
    def test_bregman_non_negative(self, seed):
        rng = np.random.default_rng(seed)
        y, x = rng.standard_normal(5), rng.standard_normal((4, 5))
        self.assertGreaterEqual(dcopt.bregman_df(self.p, y, x), -1e-10)
        quadratic = dcopt.test_utils.quadratic_test_problem(m=4, d=5, seed=seed % 1000)
        self.assertGreaterEqual(dcopt.bregman_df(quadratic, y, x), -1e-10)

    def test_move_ridge_to_locals(self):
        moved = self.p.move_ridge_to_locals()
        self.assertEqual(moved.reg.mu, 0)
        self.assertEqual(moved.reg.sigma, self.p.reg.sigma)
        self.assertAlmostEqual(moved.local_mu, self.p.local_mu + self.p.mu)
        v = np.random.default_rng(3).standard_normal(5)
        self.assertAlmostEqual(moved.value(v), self.p.value(v))
        with self.assertRaises(RegimeMismatch):
            dcopt.CompositeProblem(self.p.locals,
                                   dcopt.RidgeAugmented(dcopt.zero_regularizer(), 1e-3)
                                   ).move_ridge_to_locals()
