"""Guaranteed rates checked on actual runs"""
from unittest import TestCase

import numpy as np

import dcopt


class TestBoundFormulas(TestCase):
    def test_strongly_convex(self):
        self.assertEqual(dcopt.strongly_convex_bound(0, 100.0, 1.0, 1, f_gap=0.0, z_sq_dist=2.0,
                                                     gamma=0.1, tau=0.1), 2.0)
        rate = 1 - np.sqrt(1 / 100) / 40
        self.assertAlmostEqual(
            dcopt.strongly_convex_bound(10, 100.0, 1.0, 2, f_gap=1.0, z_sq_dist=0.0,
                                        gamma=0.1, tau=0.1),
            rate ** 10 * 4)

    def test_consensus_terms_increase_bound(self):
        kwargs = dict(f_gap=1.0, z_sq_dist=1.0, gamma=0.1, tau=0.1)
        without = dcopt.strongly_convex_bound(5, 10.0, 1.0, 3, **kwargs)
        with_s = dcopt.strongly_convex_bound(5, 10.0, 1.0, 3, pi_s=1.0, **kwargs)
        self.assertGreater(with_s, without)

    def test_general_convex(self):
        self.assertAlmostEqual(dcopt.general_convex_bound(1, 1.0, 1, f_gap=1.0, z_sq_dist=0.0),
                               15 / 16)
        bound = dcopt.general_convex_bound(np.arange(5), 2.0, 4, f_gap=0.0, z_sq_dist=1.0)
        np.testing.assert_allclose(bound, 2 * 2.0 * 200 / 4 / (np.arange(5) + 3) ** 2)

    def test_extension(self):
        kwargs = dict(m=2, f_gap=1.0, z_sq_dist=1.0, gamma=0.1, tau=0.1)
        self.assertEqual(dcopt.extension_bound(7, 10.0, 1.0, **kwargs),
                         dcopt.strongly_convex_bound(7, 9.0, 1.0, **kwargs))

    def test_requires_reference(self):
        p = dcopt.test_utils.quadratic_test_problem(m=3, d=4)
        w = dcopt.gossip_matrix(dcopt.builtin_graph('complete', 3))
        result = dcopt.run(p, w, dcopt.make_schedule('strongly_convex_g', p, w.gap, T=2))
        with self.assertRaises(ValueError):
            dcopt.bound_for_run(result, p)
        reference = dcopt.centralized_reference(p)
        baseline = dcopt.run(p, w, dcopt.make_schedule('baseline', p, w.gap, T=2),
                             reference=reference, variant='baseline')
        with self.assertRaises(ValueError):
            dcopt.bound_for_run(baseline, p)


class TestRunsWithinBounds(TestCase):
    """Ten agents on a ring with L = 100 quadratics and an elastic net"""

    def setUp(self):
        self.w = dcopt.gossip_matrix(dcopt.builtin_graph('ring', 10))

    def test_strongly_convex(self):
        p = dcopt.test_utils.quadratic_test_problem(m=10, d=20, smoothness=100.0,
                                                    sigma=1e-3, mu=1e-2)
        sched = dcopt.make_schedule('strongly_convex_g', p, self.w.gap, T=400)
        self.assertEqual(sched.K, dcopt.default_k(self.w.gap))
        reference = dcopt.centralized_reference(p, tol=1e-12)
        result = dcopt.run(p, self.w, sched, reference=reference)
        sq_dist = result.column('sq_dist')
        self.assertTrue(np.all(sq_dist <= dcopt.bound_for_run(result, p)))

        # the bound as stated for a consensus start, without the tracker term
        terms = dcopt.initial_terms(result.initial, p, reference)
        index = np.arange(1, 401) + 1
        simple = ((1 - np.sqrt(p.mu / p.L) / 40) ** index
                  * (2 * p.m / p.mu * terms['f_gap'] + terms['z_sq_dist']))
        self.assertTrue(np.all(sq_dist <= simple))
        self.assertEqual(terms['pi_x'], 0)
        self.assertEqual(terms['pi_z'], 0)

    def test_general_convex(self):
        p = dcopt.test_utils.quadratic_test_problem(m=10, d=20, smoothness=100.0,
                                                    sigma=1e-3, mu=0.0)
        sched = dcopt.make_schedule('general_convex_g', p, self.w.gap, T=2000)
        reference = dcopt.centralized_reference(p, tol=1e-12)
        result = dcopt.run(p, self.w, sched, reference=reference)
        suboptimality = result.column('suboptimality')
        self.assertTrue(np.all(suboptimality <= dcopt.bound_for_run(result, p)))

        terms = dcopt.initial_terms(result.initial, p, reference)
        index = np.arange(1, 2001) + 1
        simple = ((15 * terms['f_gap'] + 2 * p.L * dcopt.C_F / p.m * terms['z_sq_dist'])
                  / (index + 3) ** 2)
        self.assertTrue(np.all(suboptimality <= simple))
        self.assertLess(suboptimality[-1], suboptimality[0])

    def test_extension(self):
        mu = 1.0
        locals_ = dcopt.random_quadratic_locals(10, 20, 10 * mu, seed=5, strong_convexity=mu)
        p = dcopt.CompositeProblem(locals_, dcopt.elastic_net(0.1, 0.0), local_mu=mu)
        sched = dcopt.make_schedule('extension', p, self.w.gap, T=300)
        self.assertEqual(sched.K, dcopt.default_k(self.w.gap, 'extension'))
        reference = dcopt.centralized_reference(p, tol=1e-12)
        result = dcopt.run(p, self.w, sched, reference=reference, variant='odapg_ext')
        self.assertTrue(np.all(result.column('sq_dist') <= dcopt.bound_for_run(result, p)))
