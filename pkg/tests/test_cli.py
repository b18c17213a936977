import io
import json
import os
import tempfile
from contextlib import redirect_stdout
from unittest import TestCase

import numpy as np

import dcopt
from dcopt.harness.cli import EXIT_CONFIG, EXIT_FAILED_CHECK, EXIT_NUMERICAL, EXIT_OK


def _main(*argv):
    """Run the command line, return the exit code and stdout"""
    stdout = io.StringIO()
    with redirect_stdout(stdout):
        code = dcopt.main(list(argv))
    return code, stdout.getvalue()


class TestCli(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, *name):
        return os.path.join(self.tmp.name, *name)

    def test_run_reproducible(self):
        config = dcopt.test_utils.write_test_config(self.path('config.json'))
        contents = []
        for name in ('first.csv', 'second.csv'):
            code, _ = _main('run', '--config', config, '--out', self.path(name))
            self.assertEqual(code, EXIT_OK)
            with open(self.path(name), 'rb') as f:
                contents.append(f.read())
        self.assertEqual(contents[0], contents[1])
        self.assertEqual(len(dcopt.read_metrics_csv(self.path('first.csv'))), 50)
        self.assertTrue(os.path.exists(self.path('first.json')))

    def test_invalid_config(self):
        config = dcopt.test_utils.write_test_config(self.path('config.json'),
                                                    topology=dict(kind='ring'))
        code, _ = _main('run', '--config', config, '--out', self.path('run.csv'))
        self.assertEqual(code, EXIT_CONFIG)
        self.assertFalse(os.path.exists(self.path('run.csv')))

    def test_ridge_above_smoothness(self):
        config = dcopt.test_utils.write_test_config(
            self.path('config.json'),
            problem=dict(kind='synthetic_logistic', n_per_agent=10, d=5, sigma=1e-3, mu=5.0))
        code, _ = _main('run', '--config', config, '--out', self.path('run.csv'))
        self.assertEqual(code, EXIT_CONFIG)
        self.assertFalse(os.path.exists(self.path('run.csv')))

    def test_missing_config(self):
        code, _ = _main('run', '--config', self.path('missing.json'),
                        '--out', self.path('run.csv'))
        self.assertEqual(code, EXIT_CONFIG)

    def test_topology(self):
        config = dcopt.test_utils.write_test_config(self.path('config.json'))
        code, stdout = _main('topology', '--config', config)
        self.assertEqual(code, EXIT_OK)
        report = json.loads(stdout)
        self.assertTrue(report['report']['passed'])
        self.assertEqual(report['m'], 4)
        self.assertEqual(report['default_k'], dcopt.default_k(report['gap']))

    def test_topology_path_two(self):
        config = dcopt.test_utils.write_test_config(self.path('config.json'),
                                                    topology=dict(kind='path', m=2))
        code, stdout = _main('topology', '--config', config, '--out', self.path('topo.json'))
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(json.loads(stdout)['gap'], 1)
        with open(self.path('topo.json')) as f:
            self.assertEqual(json.load(f)['m'], 2)

    def test_topology_failed_check(self):
        config = dcopt.test_utils.write_test_config(
            self.path('config.json'),
            topology=dict(kind='matrix', w=np.eye(3).tolist()))
        code, stdout = _main('topology', '--config', config)
        self.assertEqual(code, EXIT_FAILED_CHECK)
        report = json.loads(stdout)
        failed = [c['name'] for c in report['report']['clauses'] if not c['passed']]
        self.assertEqual(failed, ['lambda2_below_one'])
        self.assertIsNone(report['default_k'])

    def test_topology_preset(self):
        code, stdout = _main('topology', '--config', 'synthetic-gc')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(stdout)['m'], 20)

    def test_compare(self):
        config = dcopt.test_utils.write_test_config(self.path('config.json'))
        code, stdout = _main('compare', '--config', config, '--out', self.path('compare'))
        self.assertEqual(code, EXIT_OK)
        self.assertIn('0.001', json.loads(stdout))
        self.assertTrue(os.path.exists(self.path('compare', 'summary.json')))

    def test_compare_single_solver(self):
        config = dcopt.test_utils.write_test_config(self.path('config.json'),
                                                    solvers=[dict(variant='odapg')])
        code, _ = _main('compare', '--config', config, '--out', self.path('compare'))
        self.assertEqual(code, EXIT_CONFIG)

    def test_diverging_run(self):
        config = dcopt.test_utils.write_test_config(
            self.path('config.json'),
            problem=dict(kind='quadratic', d=3, L=10.0, strong_convexity=1.0, mu=0.1),
            solver=dict(variant='odapg', T=500, K=1, gamma=1e3, tau=1.0))
        with np.errstate(all='ignore'):
            code, _ = _main('run', '--config', config, '--out', self.path('run.csv'))
        self.assertEqual(code, EXIT_NUMERICAL)
        partial = dcopt.read_metrics_csv(self.path('run.csv'))
        self.assertLess(len(partial), 500)

    def test_requires_command(self):
        with self.assertRaises(SystemExit):
            dcopt.build_parser().parse_args([])
