import os
import typing as ty

import numpy as np

import dcopt

export, __all__ = dcopt.exporter()


@export
def test_context():
    """just returns the base context, might be different one day"""
    return dcopt.base_context()


def skip_long_test() -> ty.Tuple[bool, str]:
    """
    Wrapper for checking and mentioning if a test gets skipped because
    we are doing a short test.
    """
    do = os.environ.get('RUN_TEST_EXTENDED', False)
    skip = not do
    why = 'running quick test, set "export RUN_TEST_EXTENDED=1" to activate'
    return skip, why


@export
def finite_difference_gradient(fun: ty.Callable, v: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central differences of a scalar function"""
    v = np.asarray(v, dtype=np.float64)
    result = np.zeros_like(v)
    for i in range(len(v)):
        step = np.zeros_like(v)
        step[i] = h
        result[i] = (fun(v + step) - fun(v - step)) / (2 * h)
    return result


@export
def quadratic_test_problem(m: int = 10,
                           d: int = 20,
                           smoothness: float = 100.0,
                           sigma: float = 1e-3,
                           mu: float = 1e-2,
                           seed: int = 0,
                           strong_convexity: float = 0.0,
                           ) -> 'dcopt.CompositeProblem':
    """Random quadratic locals with an elastic net, the setting of the rate checks"""
    locals_ = dcopt.random_quadratic_locals(m, d, smoothness, seed,
                                            strong_convexity=strong_convexity)
    return dcopt.CompositeProblem(locals_, dcopt.elastic_net(sigma, mu))


@export
def logistic_test_problem(m: int = 4,
                          n_per_agent: int = 10,
                          d: int = 5,
                          sigma: float = 1e-3,
                          mu: float = 1e-2,
                          seed: int = 0,
                          ) -> 'dcopt.CompositeProblem':
    datasets = dcopt.synth_logistic(m, n_per_agent, d, seed)
    return dcopt.logistic_problem(datasets, sigma, mu)


@export
def write_test_config(path: str, **overrides) -> str:
    """A small, fast experiment config written to path"""
    config = dict(name='test',
                  seed=1,
                  topology=dict(kind='ring', m=4),
                  problem=dict(kind='synthetic_logistic', n_per_agent=10, d=5,
                               sigma=1e-3, mu=1e-2),
                  solver=dict(variant='odapg', T=50),
                  solvers=[dict(label='odapg', variant='odapg'),
                           dict(label='baseline', variant='baseline')],
                  reference=dict(tol=1e-10, cap=100_000),
                  )
    config.update(overrides)
    dcopt.utils.dump_json(config, path)
    return path
