"""The composite problem min_x (1/m) sum_i f_i(x) + g(x) and its aggregate operators"""
import typing as ty
from dataclasses import dataclass

import numpy as np

import dcopt
from dcopt.consensus import AgentStates, as_agent_states
from dcopt.exceptions import DimensionMismatch, RegimeMismatch
from dcopt.objective.regularizers import ElasticNet, Regularizer, elastic_net
from dcopt.objective.smooth import ShiftedLocal, SmoothLocal, logistic_local

export, __all__ = dcopt.exporter()


@export
@dataclass
class GradLedger:
    """Cumulative number of local gradient evaluations"""
    evaluations: int = 0

    def add(self, n: int):
        if n < 0:
            raise ValueError(f'Cannot add {n} gradient evaluations')
        self.evaluations += int(n)


@export
class CompositeProblem:
    """
    F(x) = (1/m) sum_i f_i(x) + g(x)

    :param locals: the m smooth local objectives, all of the same dimension
    :param reg: the shared regularizer g
    :param local_mu: common strong convexity modulus of the f_i, defaults to
        the smallest modulus the locals report
    """

    def __init__(self,
                 locals: ty.Sequence[SmoothLocal],
                 reg: Regularizer,
                 local_mu: ty.Optional[float] = None,
                 ):
        locals = tuple(locals)
        if not locals:
            raise ValueError('Need at least one local objective')
        dims = {f.dim for f in locals}
        if len(dims) != 1:
            raise DimensionMismatch(f'Local objectives have different dimensions {dims}')
        self.locals = locals
        self.reg = reg
        self.m = len(locals)
        self.d = dims.pop()
        self.L = float(max(f.smoothness for f in locals))
        self.mu = float(reg.mu)
        self.local_mu = float(min(f.strong_convexity for f in locals)
                              if local_mu is None else local_mu)
        if not 0 <= self.mu <= self.L:
            raise ValueError(f'Need 0 <= mu <= L, got mu={self.mu}, L={self.L}')

    def __repr__(self):
        return (f'CompositeProblem(m={self.m}, d={self.d}, L={self.L:.4g}, '
                f'mu={self.mu:.4g}, reg={self.reg!r})')

    def smooth_value(self, v) -> float:
        """f(v) = (1/m) sum_i f_i(v)"""
        return float(np.mean([f.value(v) for f in self.locals]))

    def value(self, v) -> float:
        """F(v) = f(v) + g(v)"""
        return self.smooth_value(v) + self.reg.value(v)

    def average_gradient(self, v) -> np.ndarray:
        return np.mean([f.gradient(v) for f in self.locals], axis=0)

    def move_ridge_to_locals(self) -> 'CompositeProblem':
        """
        Rewrite (f_i, sigma ||.||_1 + mu/2 ||.||^2) as
        (f_i + mu/2 ||.||^2, sigma ||.||_1). The objective F is unchanged.
        """
        if not isinstance(self.reg, ElasticNet):
            raise RegimeMismatch(f'Can only move the ridge of an elastic net, got {self.reg!r}')
        shifted = [ShiftedLocal(f, self.reg.mu) for f in self.locals]
        return CompositeProblem(shifted,
                                elastic_net(self.reg.sigma, 0.0),
                                local_mu=self.local_mu + self.reg.mu)


@export
def logistic_problem(datasets: ty.Sequence, sigma: float, mu: float) -> CompositeProblem:
    """Sparse logistic regression: one logistic local per agent dataset, elastic net g"""
    return CompositeProblem([logistic_local(ds) for ds in datasets],
                            elastic_net(sigma, mu))


@export
def aggregate_gradient(p: CompositeProblem,
                       x: AgentStates,
                       counter: ty.Optional[GradLedger] = None,
                       ) -> AgentStates:
    """Row i is grad f_i evaluated at row i of x, charging m evaluations"""
    x = as_agent_states(x, p.m, p.d)
    if counter is not None:
        counter.add(p.m)
    return np.vstack([f.gradient(row) for f, row in zip(p.locals, x)])


@export
def aggregate_prox(reg: Regularizer, gamma: float, x: AgentStates) -> AgentStates:
    """Rowwise prox_{gamma g}"""
    if gamma <= 0:
        raise ValueError(f'Prox step should be positive, got {gamma}')
    return reg.prox_rows(gamma, as_agent_states(x))


@export
def aggregate_value(p: CompositeProblem, x: AgentStates) -> np.ndarray:
    """Vector of f_i evaluated at row i of x, no gradient is charged"""
    x = as_agent_states(x, p.m, p.d)
    return np.array([f.value(row) for f, row in zip(p.locals, x)])


@export
def bregman_df(p: CompositeProblem, y, x: AgentStates) -> float:
    """
    (1/m) sum_i f_i(y) - f_i(x_i) - <grad f_i(x_i), y - x_i>

    Not charged to any gradient ledger, this is a diagnostic.
    """
    x = as_agent_states(x, p.m, p.d)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (p.d,):
        raise DimensionMismatch(f'Expected a vector of length {p.d}, got {y.shape}')
    terms = [f.value(y) - f.value(row) - f.gradient(row) @ (y - row)
             for f, row in zip(p.locals, x)]
    return float(np.mean(terms))
