"""
Experiment configuration: JSON files (or shipped presets) resolved into a
frozen, validated ExperimentConfig.

Schema (defaults in brackets)::

    name: str ["experiment"]
    seed: int [0], overridden by the DCOPT_SEED environment variable
    topology:
        kind: er | ring | path | complete | star | matrix
        m: int >= 2 (required unless kind is matrix)
        p: float in (0, 1] (er only)
        seed: int [seed]
        w: square matrix (matrix only)
    problem:
        kind: synthetic_logistic | libsvm | quadratic
        n_per_agent, d: int (synthetic_logistic)
        path: str, d: int [null], partition: contiguous | round_robin (libsvm)
        d: int, L: float, strong_convexity: float [0] (quadratic)
        sigma: float [0], mu: float [0]
        seed: int [seed + 1]
    solver / solvers[]:
        label: str [variant], variant: odapg | odapg_ext | baseline ["odapg"]
        regime: str [from variant and mu], T: int >= 1 [from the top-level
        solver], K, gamma, tau: overrides [null]
    x1: list of d floats [zeros]
    reference: tol [1e-10], cap [100000]
    output: include_timing [false]
"""
import json
import os
import typing as ty

from immutabledict import immutabledict

import dcopt
from dcopt.exceptions import ConfigError
from dcopt.objective.data import PARTITION_SCHEMES
from dcopt.solver.runner import VARIANTS
from dcopt.solver.schedule import REGIMES
from dcopt.topology import BUILTIN_KINDS

export, __all__ = dcopt.exporter()
__all__ += ['TOPOLOGY_KINDS', 'PROBLEM_KINDS', 'SEED_ENV']

TOPOLOGY_KINDS = ('er',) + BUILTIN_KINDS + ('matrix',)
PROBLEM_KINDS = ('synthetic_logistic', 'libsvm', 'quadratic')
SEED_ENV = 'DCOPT_SEED'

_SOLVER_DEFAULTS = dict(variant='odapg', regime=None, T=None, K=None, gamma=None, tau=None)
_REFERENCE_DEFAULTS = dict(tol=1e-10, cap=100_000)
_OUTPUT_DEFAULTS = dict(include_timing=False)


def _require(section: dict, key: str, where: str):
    if section.get(key) is None:
        raise ConfigError(f'Missing "{key}" in {where}')
    return section[key]


def _positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f'{name} should be an integer >= {minimum}, got {value!r}')
    return value


def _non_negative(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
        raise ConfigError(f'{name} should be a number >= 0, got {value!r}')
    return float(value)


def _topology(raw: dict, seed: int) -> dict:
    kind = _require(raw, 'kind', 'topology')
    if kind not in TOPOLOGY_KINDS:
        raise ConfigError(f'Unknown topology kind {kind}, choose from {TOPOLOGY_KINDS}')
    result = dict(kind=kind, seed=raw.get('seed', seed))
    if kind == 'matrix':
        w = _require(raw, 'w', 'topology')
        square = isinstance(w, (list, tuple)) and all(
            isinstance(r, (list, tuple)) and len(r) == len(w) for r in w)
        if not square:
            raise ConfigError('topology.w should be a square list of lists')
        result.update(w=w, m=len(w))
        return result
    result['m'] = _positive_int(_require(raw, 'm', 'topology'), 'topology.m', minimum=2)
    if kind == 'er':
        p = _require(raw, 'p', 'topology')
        if not isinstance(p, (int, float)) or not 0 < p <= 1:
            raise ConfigError(f'topology.p should be in (0, 1], got {p!r}')
        result['p'] = float(p)
    return result


def _problem(raw: dict, seed: int) -> dict:
    kind = _require(raw, 'kind', 'problem')
    if kind not in PROBLEM_KINDS:
        raise ConfigError(f'Unknown problem kind {kind}, choose from {PROBLEM_KINDS}')
    result = dict(kind=kind,
                  sigma=_non_negative(raw.get('sigma', 0.0), 'problem.sigma'),
                  mu=_non_negative(raw.get('mu', 0.0), 'problem.mu'),
                  seed=raw.get('seed', seed + 1))
    if kind == 'synthetic_logistic':
        result['n_per_agent'] = _positive_int(_require(raw, 'n_per_agent', 'problem'),
                                              'problem.n_per_agent')
        result['d'] = _positive_int(_require(raw, 'd', 'problem'), 'problem.d')
    elif kind == 'libsvm':
        path = _require(raw, 'path', 'problem')
        if not os.path.exists(path):
            raise FileNotFoundError(f'Dataset {path} not found')
        scheme = raw.get('partition', 'contiguous')
        if scheme not in PARTITION_SCHEMES:
            raise ConfigError(f'Unknown partition {scheme}, choose from {PARTITION_SCHEMES}')
        d = raw.get('d')
        result.update(path=path,
                      d=None if d is None else _positive_int(d, 'problem.d'),
                      partition=scheme,
                      partition_seed=raw.get('partition_seed'))
    else:
        result['d'] = _positive_int(_require(raw, 'd', 'problem'), 'problem.d')
        result['L'] = _non_negative(_require(raw, 'L', 'problem'), 'problem.L')
        result['strong_convexity'] = _non_negative(raw.get('strong_convexity', 0.0),
                                                   'problem.strong_convexity')
    return result


def _solver(raw: dict, default_t: ty.Optional[int], mu: float, where: str) -> dict:
    unknown = set(raw) - set(_SOLVER_DEFAULTS) - {'label'}
    if unknown:
        raise ConfigError(f'Unknown keys {sorted(unknown)} in {where}')
    result = {**_SOLVER_DEFAULTS, **raw}
    variant = result['variant']
    if variant not in VARIANTS:
        raise ConfigError(f'Unknown variant {variant} in {where}, choose from {list(VARIANTS)}')
    if result['regime'] is None:
        result['regime'] = dict(odapg='strongly_convex_g' if mu > 0 else 'general_convex_g',
                                odapg_ext='extension',
                                baseline='baseline')[variant]
    if result['regime'] not in REGIMES:
        raise ConfigError(f'Unknown regime {result["regime"]} in {where}')
    if result['regime'] not in VARIANTS[variant]:
        raise ConfigError(f'{variant} cannot run regime {result["regime"]} ({where})')
    if result['T'] is None:
        result['T'] = default_t
    result['T'] = _positive_int(result['T'], f'{where}.T')
    if result['K'] is not None:
        result['K'] = _positive_int(result['K'], f'{where}.K', minimum=0)
    result.setdefault('label', variant)
    if result.get('label') is None:
        result['label'] = variant
    return result


def _seed(raw: ty.Mapping) -> int:
    seed = raw.get('seed', 0)
    if os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError as e:
            raise ConfigError(f'{SEED_ENV} should be an integer') from e
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f'seed should be an integer, got {seed!r}')
    return seed


@export
def resolve_config(raw: ty.Mapping) -> immutabledict:
    """
    Validate a raw configuration and fill in all defaults

    :raises ConfigError: on missing or invalid entries
    :raises FileNotFoundError: if a referenced dataset does not exist
    """
    if not isinstance(raw, ty.Mapping):
        raise ConfigError(f'A config should be a JSON object, got {type(raw).__name__}')
    raw = dcopt.utils.immutable_to_dict(raw) if isinstance(raw, immutabledict) else dict(raw)
    seed = _seed(raw)

    topology = _topology(_require(raw, 'topology', 'config'), seed)
    problem = _problem(_require(raw, 'problem', 'config'), seed)

    solver_raw = raw.get('solver', {})
    top_t = solver_raw.get('T')
    solvers = [_solver(s, top_t, problem['mu'], f'solvers[{i}]')
               for i, s in enumerate(raw.get('solvers', []))]
    solver = _solver(solver_raw, None, problem['mu'], 'solver') if solver_raw else None
    if solver is None and not solvers:
        raise ConfigError('Config needs a "solver" or a "solvers" list')
    labels = [s['label'] for s in solvers]
    if len(set(labels)) != len(labels):
        raise ConfigError(f'Solver labels should be unique, got {labels}')

    x1 = raw.get('x1')
    if x1 is not None and not isinstance(x1, (list, tuple)):
        raise ConfigError('x1 should be a list of numbers')

    config = dict(name=raw.get('name', 'experiment'),
                  seed=seed,
                  topology=topology,
                  problem=problem,
                  solver=solver,
                  solvers=solvers,
                  x1=x1,
                  reference={**_REFERENCE_DEFAULTS, **raw.get('reference', {})},
                  output={**_OUTPUT_DEFAULTS, **raw.get('output', {})},
                  )
    return dcopt.utils.freeze(config)


@export
def load_raw_config(path: str) -> dict:
    """Read the JSON object of a config file"""
    if not os.path.exists(path):
        raise FileNotFoundError(f'Config {path} not found')
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f'{path} is not valid JSON: {e}') from e
    if not isinstance(raw, dict):
        raise ConfigError(f'{path} should hold a JSON object')
    return raw


@export
def load_config(path: str) -> immutabledict:
    """Read and resolve a config file"""
    return resolve_config(load_raw_config(path))


@export
def resolve_topology_config(raw: ty.Mapping) -> immutabledict:
    """Only the seed and topology section, for topology inspection"""
    seed = _seed(raw)
    return dcopt.utils.freeze(dict(name=raw.get('name', 'experiment'),
                                   seed=seed,
                                   topology=_topology(_require(raw, 'topology', 'config'), seed)))


@export
def config_hash(config: ty.Mapping) -> str:
    return dcopt.utils.deterministic_hash(dcopt.utils.immutable_to_dict(config)
                                          if isinstance(config, immutabledict) else config)
