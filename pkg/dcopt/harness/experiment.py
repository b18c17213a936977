"""Assemble experiments from a config, run them and persist the metrics"""
import os
import typing as ty
from functools import cached_property

import numpy as np
import pandas as pd

import dcopt
from dcopt.exceptions import ConfigError, EmptyDataset, ParseError
from dcopt.harness.config import config_hash
from dcopt.objective import data as data_module
from dcopt.objective.problem import CompositeProblem
from dcopt.objective.regularizers import elastic_net
from dcopt.objective.smooth import SmoothLocal, logistic_local, random_quadratic_locals
from dcopt.solver.reference import Reference, centralized_reference
from dcopt.solver.runner import run
from dcopt.solver.schedule import Schedule, make_schedule
from dcopt.solver.state import METRICS_COLUMNS, MetricsRecord, RunResult
from dcopt.topology import (GossipMatrix, builtin_graph, generate_er_graph, gossip_matrix,
                            validate_gossip)

export, __all__ = dcopt.exporter()
__all__ += ['TARGETS', 'NOT_REACHED']

TARGETS = (1e-3, 1e-6)
NOT_REACHED = 'not reached'


@export
def build_gossip(topology: ty.Mapping) -> GossipMatrix:
    """Gossip matrix of a resolved topology section"""
    kind = topology['kind']
    if kind == 'matrix':
        w = np.array(topology['w'], dtype=np.float64)
        report = validate_gossip(w)
        if not report.passed:
            raise ConfigError(f'topology.w fails {report.failed}')
        return GossipMatrix.from_matrix(w)
    if kind == 'er':
        graph = generate_er_graph(topology['m'], topology['p'], topology['seed'])
    else:
        graph = builtin_graph(kind, topology['m'])
    return gossip_matrix(graph)


def _elastic_net_problem(locals_: ty.Sequence[SmoothLocal],
                         problem: ty.Mapping,
                         ) -> CompositeProblem:
    smoothness = max(f.smoothness for f in locals_)
    if problem['mu'] > smoothness:
        raise ConfigError(f'problem.mu={problem["mu"]:g} exceeds the smoothness '
                          f'constant L={smoothness:.4g} of the data')
    return CompositeProblem(locals_, elastic_net(problem['sigma'], problem['mu']))


@export
def build_problem(problem: ty.Mapping, m: int) -> CompositeProblem:
    """Composite problem of a resolved problem section for m agents"""
    kind = problem['kind']
    if kind == 'synthetic_logistic':
        datasets = data_module.synth_logistic(m, problem['n_per_agent'], problem['d'],
                                              seed=problem['seed'])
        return _elastic_net_problem([logistic_local(ds) for ds in datasets], problem)
    if kind == 'libsvm':
        try:
            dataset = data_module.read_libsvm(problem['path'], d_hint=problem['d'])
            datasets = data_module.partition(dataset, m, problem['partition'],
                                             seed=problem.get('partition_seed'))
        except (ParseError, EmptyDataset) as e:
            raise ConfigError(f'Cannot use {problem["path"]}: {e}') from e
        return _elastic_net_problem([logistic_local(ds) for ds in datasets], problem)
    if kind == 'quadratic':
        locals_ = random_quadratic_locals(m, problem['d'], problem['L'], problem['seed'],
                                          strong_convexity=problem['strong_convexity'])
        return _elastic_net_problem(locals_, problem)
    raise ConfigError(f'Unknown problem kind {kind}')


@export
def problem_for_variant(p: CompositeProblem, variant: str) -> CompositeProblem:
    """The extension expects the ridge inside the locals"""
    if variant == 'odapg_ext' and p.reg.mu > 0:
        return p.move_ridge_to_locals()
    return p


@export
def metrics_frame(metrics: ty.Sequence[MetricsRecord],
                  include_timing: bool = False,
                  ) -> pd.DataFrame:
    columns = list(METRICS_COLUMNS if include_timing else METRICS_COLUMNS[:-1])
    return pd.DataFrame([r.to_dict() for r in metrics], columns=list(METRICS_COLUMNS))[columns]


@export
def write_metrics_csv(metrics: ty.Sequence[MetricsRecord],
                      path: str,
                      include_timing: bool = False):
    """
    One row per iteration with the fixed header METRICS_COLUMNS (wall_ms only
    if include_timing, so repeated runs give identical files)
    """
    dcopt.utils.check_folder_for_file(path)
    metrics_frame(metrics, include_timing).to_csv(path, index=False, float_format='%.17g',
                                                  na_rep='nan')


@export
def read_metrics_csv(path: str) -> ty.List[MetricsRecord]:
    df = pd.read_csv(path)
    missing = [c for c in METRICS_COLUMNS[:-1] if c not in df.columns]
    if missing:
        raise ValueError(f'{path} misses columns {missing}')
    if 'wall_ms' not in df.columns:
        df['wall_ms'] = 0.0
    return [MetricsRecord(t=int(row.t),
                          suboptimality=float(row.suboptimality),
                          sq_dist=float(row.sq_dist),
                          consensus_x=float(row.consensus_x),
                          consensus_z=float(row.consensus_z),
                          consensus_s=float(row.consensus_s),
                          grads_cumulative=int(row.grads_cumulative),
                          rounds_cumulative=int(row.rounds_cumulative),
                          wall_ms=float(row.wall_ms))
            for row in df.itertuples(index=False)]


@export
def iterations_to_target(metrics: ty.Sequence[MetricsRecord],
                         target: float,
                         column: str = 'suboptimality',
                         ) -> ty.Optional[MetricsRecord]:
    """First record whose column is at most target, None if never"""
    for record in metrics:
        if getattr(record, column) <= target:
            return record
    return None


@export
def targets_reached(metrics: ty.Sequence[MetricsRecord],
                    targets: ty.Sequence[float] = TARGETS,
                    column: str = 'suboptimality',
                    ) -> dict:
    """Iterations, gradients and rounds needed for each target"""
    result = {}
    for target in targets:
        record = iterations_to_target(metrics, target, column)
        result[f'{target:g}'] = NOT_REACHED if record is None else dict(
            iterations=record.t,
            gradients=record.grads_cumulative,
            rounds=record.rounds_cumulative)
    return result


@export
class Experiment:
    """
    A resolved configuration with lazily built topology, problem and
    reference. Use run_solver for each solver entry of the config.
    """

    def __init__(self, config: ty.Mapping, verbose: ty.Union[bool, int] = 0):
        self.config = config
        self.verbose = verbose
        self.log = dcopt.utils.get_logger('dcopt.experiment',
                                          dcopt.utils.verbosity_to_level(verbose))

    def __repr__(self):
        return f'Experiment({self.config["name"]}, {self.hash})'

    @cached_property
    def hash(self) -> str:
        return config_hash(self.config)

    @cached_property
    def gossip(self) -> GossipMatrix:
        w = build_gossip(self.config['topology'])
        self.log.info(f'Topology {self.config["topology"]["kind"]}: {w.spectral_summary()}')
        return w

    @cached_property
    def problem(self) -> CompositeProblem:
        p = build_problem(self.config['problem'], self.gossip.m)
        self.log.info(f'Problem {p}')
        return p

    @cached_property
    def reference(self) -> Reference:
        settings = self.config['reference']
        return centralized_reference(self.problem, tol=settings['tol'], cap=settings['cap'])

    @property
    def x1(self) -> np.ndarray:
        x1 = self.config.get('x1')
        if x1 is None:
            return np.zeros(self.problem.d)
        x1 = np.asarray(x1, dtype=np.float64)
        if x1.shape != (self.problem.d,):
            raise ConfigError(f'x1 should have length {self.problem.d}, got {x1.shape}')
        return x1

    def schedule(self, solver: ty.Mapping, p: CompositeProblem) -> Schedule:
        return make_schedule(solver['regime'], p, self.gossip.gap, solver['T'],
                             K=solver['K'], gamma=solver['gamma'], tau=solver['tau'])

    def run_solver(self, solver: ty.Mapping, progress: bool = False) -> RunResult:
        p = problem_for_variant(self.problem, solver['variant'])
        sched = self.schedule(solver, p)
        return run(p, self.gossip, sched, x1=self.x1, reference=self.reference,
                   variant=solver['variant'], verbose=self.verbose, progress=progress)

    def summary(self, solver: ty.Mapping, result: RunResult) -> dict:
        """Everything needed to reproduce the run, plus its outcome"""
        sched = result.schedule
        final = result.metrics[-1].to_dict() if result.metrics else None
        if final is not None and not self.config['output']['include_timing']:
            final.pop('wall_ms')
        return dict(name=self.config['name'],
                    label=solver['label'],
                    variant=result.variant,
                    regime=sched.regime,
                    seed=self.config['seed'],
                    config_hash=self.hash,
                    gamma=sched.gamma_const,
                    tau=sched.tau_const,
                    schedule_id=sched.schedule_id,
                    K=sched.K,
                    T=sched.T,
                    L=sched.L,
                    mu=sched.mu,
                    gap=self.gossip.gap,
                    lambda2=self.gossip.lambda2,
                    eta_w=self.gossip.eta_w,
                    m=self.problem.m,
                    d=self.problem.d,
                    reference=dict(value=self.reference.value,
                                   residual=self.reference.residual,
                                   tol=self.reference.tol),
                    ledger=result.ledger_totals(),
                    final=final,
                    targets=targets_reached(result.metrics),
                    )

    def write(self, solver: ty.Mapping, result: RunResult, csv_path: str) -> dict:
        """Write the metrics CSV and a JSON summary next to it"""
        write_metrics_csv(result.metrics, csv_path, self.config['output']['include_timing'])
        summary = self.summary(solver, result)
        dcopt.utils.dump_json(summary, os.path.splitext(csv_path)[0] + '.json')
        return summary

    def compare(self, out_dir: str, progress: bool = False) -> dict:
        """
        Run every entry of config['solvers'], write one CSV per solver and a
        combined summary.json ranking gradients and rounds to each target
        """
        solvers = self.config['solvers']
        if len(solvers) < 2:
            raise ConfigError(f'compare needs at least two solvers, got {len(solvers)}')
        summaries = {}
        for solver in solvers:
            result = self.run_solver(solver, progress=progress)
            summaries[solver['label']] = self.write(
                solver, result, os.path.join(out_dir, f'{solver["label"]}.csv'))
        combined = dict(name=self.config['name'],
                        config_hash=self.hash,
                        seed=self.config['seed'],
                        gap=self.gossip.gap,
                        solvers=summaries,
                        ranking=rank_solvers(summaries))
        dcopt.utils.dump_json(combined, os.path.join(out_dir, 'summary.json'))
        return combined


@export
def rank_solvers(summaries: ty.Mapping[str, dict], targets: ty.Sequence[float] = TARGETS) -> dict:
    """Per target, labels ordered by gradients (and rounds) needed, unreached last"""
    ranking = {}
    for target in targets:
        key = f'{target:g}'
        reached = {label: s['targets'][key] for label, s in summaries.items()
                   if s['targets'][key] != NOT_REACHED}
        ranking[key] = dict(
            gradients=sorted(reached, key=lambda label: reached[label]['gradients']),
            rounds=sorted(reached, key=lambda label: reached[label]['rounds']),
            not_reached=sorted(set(summaries) - set(reached)),
        )
    return ranking
