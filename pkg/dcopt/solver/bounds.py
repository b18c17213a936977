"""
Right-hand sides of the convergence guarantees, evaluated on actual runs.

All consensus terms enter as squared Frobenius norms of Pi x_1, Pi y_1,
Pi z_1 and Pi s_1. With a consensus start only the tracker term survives.
"""
import numpy as np

import dcopt
from dcopt.consensus import consensus_error, mean_row
from dcopt.solver.schedule import C_F
from dcopt.solver.state import RunResult, SolverState

export, __all__ = dcopt.exporter()


@export
def strongly_convex_bound(T,
                          L: float,
                          mu: float,
                          m: int,
                          f_gap: float,
                          z_sq_dist: float,
                          gamma: float,
                          tau: float,
                          pi_x: float = 0.0,
                          pi_y: float = 0.0,
                          pi_z: float = 0.0,
                          pi_s: float = 0.0,
                          ):
    """
    Bound on ||z_T - 1 x*||^2 for a mu-strongly convex g:

        (1 - sqrt(mu / L) / 40)^T [2m/mu (F(y_1) - F*) + ||z_1 - 1 x*||^2
            + 6 20^2 L / mu (pi_x + 64 pi_y + 9 tau^2/32 pi_z + 5 tau^2/14 gamma^2 pi_s)]
    """
    consensus = pi_x + 64 * pi_y + 9 * tau ** 2 / 32 * pi_z + 5 * tau ** 2 / 14 * gamma ** 2 * pi_s
    initial = 2 * m / mu * f_gap + z_sq_dist + 6 * 20 ** 2 * L / mu * consensus
    rate = 1 - np.sqrt(mu / L) / 40
    return rate ** np.asarray(T, dtype=np.float64) * initial


@export
def general_convex_bound(T,
                         L: float,
                         m: int,
                         f_gap: float,
                         z_sq_dist: float,
                         tau1: float = 0.4,
                         pi_x: float = 0.0,
                         pi_z: float = 0.0,
                         pi_s: float = 0.0,
                         c_f: float = C_F,
                         ):
    """
    Bound on F(y_T) - F* for a convex g with the increasing step size:

        [15 (F(y_1) - F*) + 2 L c_f / m ||z_1 - 1 x*||^2
            + 50 (pi_x + 9 tau_1^2/32 pi_z + 5/(14 L^2 c_f^2) pi_s)] / (T + 3)^2
    """
    consensus = pi_x + 9 * tau1 ** 2 / 32 * pi_z + 5 / (14 * L ** 2 * c_f ** 2) * pi_s
    numerator = 15 * f_gap + 2 * L * c_f / m * z_sq_dist + 50 * consensus
    return numerator / (np.asarray(T, dtype=np.float64) + 3) ** 2


@export
def extension_bound(T, L: float, mu: float, **kwargs):
    """The strongly convex bound of the shifted problem, L replaced by L - mu"""
    return strongly_convex_bound(T, L - mu, mu, **kwargs)


@export
def initial_terms(initial: SolverState, p: 'dcopt.CompositeProblem', reference) -> dict:
    """F(y_1) - F*, ||z_1 - 1 x*||^2 and the squared consensus errors of a start"""
    x_star, f_star = reference
    return dict(f_gap=p.value(mean_row(initial.y)) - f_star,
                z_sq_dist=float(np.sum((initial.z - x_star) ** 2)),
                pi_x=consensus_error(initial.x) ** 2,
                pi_y=consensus_error(initial.y) ** 2,
                pi_z=consensus_error(initial.z) ** 2,
                pi_s=consensus_error(initial.s) ** 2,
                )


@export
def bound_for_run(result: RunResult, p: 'dcopt.CompositeProblem') -> np.ndarray:
    """
    Guaranteed value of the tracked error for every metrics row. Row t holds
    the iterate with index t + 1, so it is compared with the bound at t + 1.

    For strongly convex and extension runs the bound is on sq_dist, for
    general convex runs on suboptimality.
    """
    if result.reference is None:
        raise ValueError('Bounds need a reference solution')
    terms = initial_terms(result.initial, p, result.reference)
    sched = result.schedule
    index = np.arange(1, result.T + 1) + 1
    if sched.regime == 'strongly_convex_g':
        return strongly_convex_bound(index, sched.L, sched.mu, p.m,
                                     gamma=sched.gamma(1), tau=sched.tau(1), **terms)
    if sched.regime == 'extension':
        return extension_bound(index, sched.L, sched.mu, m=p.m,
                               gamma=sched.gamma(1), tau=sched.tau(1), **terms)
    if sched.regime == 'general_convex_g':
        terms.pop('pi_y')
        return general_convex_bound(index, sched.L, p.m, tau1=sched.tau(1), c_f=sched.c_f,
                                    **terms)
    raise ValueError(f'No guarantee for regime {sched.regime}')
