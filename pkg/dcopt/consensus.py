"""
Accelerated gossip (FastMix) and consensus diagnostics.

Agent states are stored as m x d float arrays: row i holds the local copy of
agent i.
"""
import typing as ty
from dataclasses import dataclass

import numpy as np

import dcopt
from dcopt.exceptions import DimensionMismatch
from dcopt.topology import GossipMatrix

export, __all__ = dcopt.exporter()
__all__ += ['AgentStates', 'K_CONSTANTS']

AgentStates = np.ndarray

# numerators of the theoretical number of FastMix rounds, K = c / sqrt(gap)
K_CONSTANTS = {'main': 15.0, 'extension': 11.0}


@export
@dataclass
class CommLedger:
    """Cumulative number of single-hop communication rounds"""
    rounds: int = 0

    def add(self, k: int):
        if k < 0:
            raise ValueError(f'Cannot add {k} communication rounds')
        self.rounds += int(k)


@export
def as_agent_states(x, m: ty.Optional[int] = None, d: ty.Optional[int] = None) -> AgentStates:
    """Return x as an m x d float64 array, checking the shape if m or d is given"""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch(f'Agent states should be an m x d matrix, got shape {x.shape}')
    if m is not None and x.shape[0] != m:
        raise DimensionMismatch(f'Expected {m} agents, got {x.shape[0]}')
    if d is not None and x.shape[1] != d:
        raise DimensionMismatch(f'Expected dimension {d}, got {x.shape[1]}')
    return x


@export
def broadcast(v, m: int) -> AgentStates:
    """The consensus state 1 v^T: every agent holds v"""
    v = np.asarray(v, dtype=np.float64).ravel()
    return np.tile(v, (m, 1))


@export
def mean_row(x: AgentStates) -> np.ndarray:
    """Average of the agents' local copies"""
    return as_agent_states(x).mean(axis=0)


@export
def disagreement(x: AgentStates) -> AgentStates:
    """Pi x = x - 1 x_bar, the component of x outside the consensus subspace"""
    x = as_agent_states(x)
    return x - x.mean(axis=0)


@export
def consensus_error(x: AgentStates) -> float:
    """Frobenius norm ||Pi x|| of the disagreement"""
    return float(np.linalg.norm(disagreement(x)))


@export
def fast_mix(x: AgentStates,
             w: GossipMatrix,
             k: int,
             ledger: ty.Optional[CommLedger] = None,
             eta_override: ty.Optional[float] = None,
             ) -> AgentStates:
    """
    Chebyshev-type accelerated gossip

    Iterates x^{k+1} = (1 + eta) W x^k - eta x^{k-1} from x^0 = x^1 = x and
    returns the state after k multiplications with W. The row mean is
    invariant since W is doubly stochastic.

    :param x: m x d agent states
    :param w: gossip matrix
    :param k: number of rounds, k = 0 returns (a copy of) x
    :param ledger: communication ledger, charged with k rounds
    :param eta_override: momentum to use instead of w.eta_w
    :return: mixed m x d agent states
    """
    x = as_agent_states(x)
    if x.shape[0] != w.m:
        raise DimensionMismatch(f'{x.shape[0]} agent states for a {w.m}-agent gossip matrix')
    if k < 0:
        raise ValueError(f'Number of FastMix rounds should be >= 0, got {k}')
    eta = w.eta_w if eta_override is None else float(eta_override)
    if ledger is not None:
        ledger.add(k)
    previous = current = x
    for _ in range(int(k)):
        previous, current = current, (1 + eta) * (w.w @ current) - eta * previous
    return current.copy() if k == 0 else current


@export
def default_k(gap: float, regime: str = 'main') -> int:
    """Theoretical number of FastMix rounds, ceil(15 / sqrt(gap)) or ceil(11 / sqrt(gap))"""
    if not 0 < gap <= 1:
        raise ValueError(f'Spectral gap should be in (0, 1], got {gap}')
    if regime not in K_CONSTANTS:
        raise ValueError(f'Unknown regime {regime}, choose from {list(K_CONSTANTS)}')
    return int(np.ceil(K_CONSTANTS[regime] / np.sqrt(gap)))


@export
def contraction_bound(lambda2: float, k: int) -> float:
    """Guaranteed factor sqrt(14) (1 - (1 - 1/sqrt(2)) sqrt(1 - lambda2))^k on ||Pi x||"""
    rate = 1 - (1 - 1 / np.sqrt(2)) * np.sqrt(1 - lambda2)
    return float(np.sqrt(14) * rate ** k)
