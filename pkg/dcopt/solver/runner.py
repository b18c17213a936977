"""Drive a solver variant for T iterations and record metrics"""
import time
import typing as ty

import numpy as np
from tqdm import tqdm

import dcopt
from dcopt.consensus import consensus_error, mean_row
from dcopt.exceptions import NonFiniteState, RegimeMismatch
from dcopt.objective.problem import CompositeProblem
from dcopt.solver.baseline import baseline_proxgt_step
from dcopt.solver.odapg import initialize, odapg_extension_step, odapg_step
from dcopt.solver.schedule import MAIN_REGIMES, Schedule
from dcopt.solver.state import MetricsRecord, RunResult, SolverState
from dcopt.topology import GossipMatrix

export, __all__ = dcopt.exporter()
__all__ += ['VARIANTS']

# variant -> regimes it accepts
VARIANTS = {
    'odapg': MAIN_REGIMES,
    'odapg_ext': ('extension',),
    'baseline': ('baseline',),
}


def _step_function(variant: str) -> ty.Callable:
    if variant == 'odapg':
        return odapg_step
    if variant == 'odapg_ext':
        return odapg_extension_step

    def step(state, p, w, sched):
        return baseline_proxgt_step(state, p, w, sched.gamma(state.t), sched.K,
                                    eta_override=sched.eta_override)

    return step


@export
class MetricsRecorder:
    """Evaluate the diagnostics of a state without charging any ledger"""

    def __init__(self, p: CompositeProblem, reference=None, log=None):
        self.p = p
        self.log = dcopt.utils.log if log is None else log
        self.x_star, self.f_star, self.tol = None, None, None
        if reference is not None:
            self.x_star, self.f_star = reference
            self.tol = getattr(reference, 'tol', None)

    def suboptimality(self, state: SolverState) -> float:
        if self.f_star is None:
            return np.nan
        gap = self.p.value(mean_row(state.y)) - self.f_star
        if self.tol is not None and gap < -10 * self.tol:
            self.log.warning(f'Suboptimality {gap:.3g} at t={state.t} is below -10 tol, '
                             f'the reference is not accurate enough. Clamping.')
            gap = -10 * self.tol
        return float(gap)

    def sq_dist(self, state: SolverState) -> float:
        if self.x_star is None:
            return np.nan
        return float(np.sum((state.z - self.x_star) ** 2))

    def __call__(self, row: int, state: SolverState, wall_ms: float = 0.0) -> MetricsRecord:
        return MetricsRecord(t=row,
                             suboptimality=self.suboptimality(state),
                             sq_dist=self.sq_dist(state),
                             consensus_x=consensus_error(state.x),
                             consensus_z=consensus_error(state.z),
                             consensus_s=consensus_error(state.s),
                             grads_cumulative=state.grads.evaluations,
                             rounds_cumulative=state.comm.rounds,
                             wall_ms=wall_ms,
                             )


@export
def run(p: CompositeProblem,
        w: GossipMatrix,
        sched: Schedule,
        x1=None,
        reference=None,
        variant: str = 'odapg',
        verbose: ty.Union[bool, int] = 0,
        progress: bool = False,
        ) -> RunResult:
    """
    Initialize at a consensus start and iterate sched.T times

    :param p: composite problem
    :param w: gossip matrix with w.m == p.m
    :param sched: schedule, its regime must match the variant
    :param x1: start (zero by default)
    :param reference: (x*, F*), e.g. from centralized_reference
    :param variant: odapg, odapg_ext or baseline
    :param verbose: 0 warnings only, 1 info, 2 debug
    :param progress: show a progress bar
    :return: RunResult with sched.T metrics rows
    :raises NonFiniteState: carrying the metrics recorded so far
    """
    if variant not in VARIANTS:
        raise ValueError(f'Unknown variant {variant}, choose from {list(VARIANTS)}')
    if sched.regime not in VARIANTS[variant]:
        raise RegimeMismatch(f'{variant} cannot run a {sched.regime} schedule')
    log = dcopt.utils.get_logger(f'dcopt.{variant}', dcopt.utils.verbosity_to_level(verbose))
    x1 = np.zeros(p.d) if x1 is None else x1
    shift = sched.mu if variant == 'odapg_ext' else 0.0
    state = initialize(p, x1, shift=shift)
    initial = state.copy()
    step = _step_function(variant)
    recorder = MetricsRecorder(p, reference, log)
    log.info(f'Running {variant} on {p} for T={sched.T}, K={sched.K}, {sched.schedule_id}')

    metrics = []
    start = time.perf_counter()
    for row in tqdm(range(1, sched.T + 1), disable=not progress, desc=variant):
        try:
            state = step(state, p, w, sched)
        except NonFiniteState as e:
            log.error(f'Diverged at iteration {row}: {e}')
            e.metrics = list(metrics)
            raise
        metrics.append(recorder(row, state, wall_ms=1e3 * (time.perf_counter() - start)))
        if row % max(1, sched.T // 10) == 0:
            log.debug(f'{metrics[-1]}')

    log.info(f'Done after {state.grads.evaluations} gradients and {state.comm.rounds} rounds')
    return RunResult(final=state,
                     metrics=metrics,
                     initial=initial,
                     schedule=sched,
                     variant=variant,
                     reference=None if reference is None else tuple(reference),
                     )
