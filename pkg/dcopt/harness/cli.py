"""
Command line interface: dcopt {run,topology,compare} --config <path|preset> --out <path>

Exit codes: 0 success, 1 topology report with failed clauses, 2 invalid
configuration, 3 numerical failure.
"""
import argparse
import os
import sys
import typing as ty

import numpy as np

import dcopt
from dcopt.consensus import default_k
from dcopt.exceptions import (ConfigError, ConnectivityFailure, NoConvergence, NonFiniteState,
                              RegimeMismatch, SpectralFailure)
from dcopt.harness import config as config_module
from dcopt.harness.experiment import Experiment, build_gossip, write_metrics_csv
from dcopt.topology import validate_gossip

export, __all__ = dcopt.exporter()
__all__ += ['EXIT_OK', 'EXIT_FAILED_CHECK', 'EXIT_CONFIG', 'EXIT_NUMERICAL']

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CONFIG_ERRORS = (ConfigError, FileNotFoundError, RegimeMismatch)
NUMERICAL_ERRORS = (NonFiniteState, NoConvergence, SpectralFailure, ConnectivityFailure)

log = dcopt.utils.log


@export
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='dcopt',
        description='Decentralized accelerated proximal gradient experiments')
    parser.add_argument('--version', action='version', version=dcopt.__version__)
    sub = parser.add_subparsers(dest='command', required=True)
    for name, text in (('run', 'run a single solver and write a metrics CSV + JSON summary'),
                       ('topology', 'validate the gossip matrix and print its spectrum'),
                       ('compare', 'run all solvers of the config and rank them')):
        command = sub.add_parser(name, help=text)
        command.add_argument('--config', required=True,
                             help='JSON file or the name of a shipped preset')
        command.add_argument('--out', default=None,
                             help='output path (a directory for compare)')
        command.add_argument('-v', '--verbose', action='count', default=0)
        command.add_argument('--progress', action='store_true', help='show a progress bar')
    return parser


@export
def cli_run(config_path: str, out: ty.Optional[str] = None, verbose: int = 0,
            progress: bool = False) -> int:
    context = dcopt.context.base_context()
    config = context.get_config(config_path)
    if config['solver'] is None:
        raise ConfigError('run needs a "solver" section')
    experiment = Experiment(config, verbose=verbose)
    csv_path = out or context.output_path(f'{config["name"]}.csv')
    try:
        result = experiment.run_solver(config['solver'], progress=progress)
    except NonFiniteState as e:
        write_metrics_csv(e.metrics, csv_path, config['output']['include_timing'])
        log.error(f'Run diverged at t={e.t}, wrote {len(e.metrics)} rows to {csv_path}')
        raise
    summary = experiment.write(config['solver'], result, csv_path)
    log.info(f'Wrote {csv_path}, final metrics {summary["final"]}')
    return EXIT_OK


@export
def cli_topology(config_path: str, out: ty.Optional[str] = None, verbose: int = 0) -> int:
    raw = dcopt.context.base_context().get_raw_config(config_path)
    config = config_module.resolve_topology_config(raw)
    topology = config['topology']
    if topology['kind'] == 'matrix':
        w = np.array(topology['w'], dtype=np.float64)
        report = validate_gossip(w)
        spectrum = dict(m=w.shape[0], lambda2=report.lambda2, gap=1 - report.lambda2)
    else:
        gossip = build_gossip(topology)
        report = validate_gossip(gossip.w, edges=gossip.graph.edges)
        spectrum = gossip.spectral_summary()
    gap = spectrum['gap']
    usable = report.passed and 0 < gap <= 1
    result = dict(name=config['name'],
                  seed=config['seed'],
                  topology=dcopt.utils.immutable_to_dict(topology),
                  report=report.to_dict(),
                  **spectrum,
                  default_k=default_k(gap, 'main') if usable else None,
                  default_k_extension=default_k(gap, 'extension') if usable else None,
                  )
    text = dcopt.utils.dump_json(result, out)
    print(text)
    if not report.passed:
        log.error(f'Gossip matrix fails {report.failed}')
        return EXIT_FAILED_CHECK
    return EXIT_OK


@export
def cli_compare(config_path: str, out: ty.Optional[str] = None, verbose: int = 0,
                progress: bool = False) -> int:
    context = dcopt.context.base_context()
    config = context.get_config(config_path)
    if len(config['solvers']) < 2:
        raise ConfigError(f'compare needs at least two solver specs, got {len(config["solvers"])}')
    out_dir = out or context.output_path(f'{config["name"]}_compare')
    os.makedirs(out_dir, exist_ok=True)
    combined = Experiment(config, verbose=verbose).compare(out_dir, progress=progress)
    print(dcopt.utils.dump_json(combined['ranking']))
    return EXIT_OK


@export
def main(argv: ty.Optional[ty.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        log.setLevel(dcopt.utils.verbosity_to_level(args.verbose))
    try:
        if args.command == 'run':
            return cli_run(args.config, args.out, args.verbose, args.progress)
        if args.command == 'topology':
            return cli_topology(args.config, args.out, args.verbose)
        return cli_compare(args.config, args.out, args.verbose, args.progress)
    except CONFIG_ERRORS as e:
        log.error(f'Invalid configuration: {e}')
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as e:
        log.error(f'Numerical failure ({e.__class__.__name__}): {e}')
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
