"""Solver state, per-iteration metrics and run results"""
import typing as ty
from dataclasses import astuple, dataclass, field, fields

import numpy as np

import dcopt
from dcopt.consensus import CommLedger
from dcopt.objective.problem import GradLedger

export, __all__ = dcopt.exporter()
__all__ += ['METRICS_COLUMNS']


@export
@dataclass(eq=False)
class SolverState:
    """
    Iterates of the decentralized solvers, all m x d agent states.

    :param t: iteration index, the initial state has t = 1
    :param prev_grad: local gradients at x, kept for the tracking difference
    :param z_hat: pre-mixing prox output of the last step (None at t = 1)
    """
    t: int
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: np.ndarray
    prev_grad: np.ndarray
    grads: GradLedger = field(default_factory=GradLedger)
    comm: CommLedger = field(default_factory=CommLedger)
    z_hat: ty.Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in (self.x, self.y, self.z, self.s))

    def copy(self) -> 'SolverState':
        return SolverState(t=self.t,
                           x=self.x.copy(),
                           y=self.y.copy(),
                           z=self.z.copy(),
                           s=self.s.copy(),
                           prev_grad=self.prev_grad.copy(),
                           grads=GradLedger(self.grads.evaluations),
                           comm=CommLedger(self.comm.rounds),
                           z_hat=None if self.z_hat is None else self.z_hat.copy(),
                           )


@export
@dataclass(frozen=True)
class MetricsRecord:
    """One row of diagnostics, see METRICS_COLUMNS for the CSV order"""
    t: int
    suboptimality: float
    sq_dist: float
    consensus_x: float
    consensus_z: float
    consensus_s: float
    grads_cumulative: int
    rounds_cumulative: int
    wall_ms: float = 0.0

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_tuple(self) -> tuple:
        return astuple(self)


METRICS_COLUMNS = tuple(f.name for f in fields(MetricsRecord))


@export
@dataclass(eq=False)
class RunResult:
    """
    Outcome of a run

    :param final: state after T iterations
    :param metrics: one record per iteration, row t describes the state
        produced by iteration t
    :param initial: the initialized state (t = 1)
    :param reference: (x*, F*) used for the metrics, if any
    """
    final: SolverState
    metrics: ty.List[MetricsRecord]
    initial: SolverState
    schedule: 'dcopt.Schedule'
    variant: str
    reference: ty.Optional[ty.Tuple[np.ndarray, float]] = None

    @property
    def T(self) -> int:
        return len(self.metrics)

    def column(self, name: str) -> np.ndarray:
        if name not in METRICS_COLUMNS:
            raise KeyError(f'{name} not in {METRICS_COLUMNS}')
        return np.array([getattr(r, name) for r in self.metrics])

    def ledger_totals(self) -> dict:
        return {'gradients': self.final.grads.evaluations,
                'rounds': self.final.comm.rounds}
