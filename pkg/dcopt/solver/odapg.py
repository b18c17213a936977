"""
Decentralized accelerated proximal gradient with gradient tracking and
accelerated gossip.

Each iteration takes three FastMix calls: one for the gradient tracker s,
one for z after the prox step and one for the momentum average y.
"""
import typing as ty

import numpy as np

import dcopt
from dcopt.consensus import CommLedger, broadcast, fast_mix
from dcopt.exceptions import DimensionMismatch, NonFiniteState, RegimeMismatch
from dcopt.objective.problem import (CompositeProblem, GradLedger, aggregate_gradient,
                                     aggregate_prox)
from dcopt.solver.schedule import MAIN_REGIMES, Schedule
from dcopt.solver.state import SolverState
from dcopt.topology import GossipMatrix

export, __all__ = dcopt.exporter()

GradientFn = ty.Callable[[np.ndarray, GradLedger], np.ndarray]
ProxFn = ty.Callable[[float, np.ndarray], np.ndarray]


def _shifted_gradient(p: CompositeProblem, mu: float) -> GradientFn:
    def gradient(x, counter):
        return aggregate_gradient(p, x, counter) - mu * x

    return gradient


def _rescaled_prox(p: CompositeProblem, mu: float) -> ProxFn:
    def prox(gamma, v):
        scale = 1 + mu * gamma
        return aggregate_prox(p.reg, gamma / scale, v / scale)

    return prox


@export
def initialize(p: CompositeProblem, x1, shift: float = 0.0) -> SolverState:
    """
    Consensus start z = y = x = 1 x1 with s = grad f(x) (minus shift * x)

    The initial gradients are not charged to the gradient ledger.
    """
    x1 = np.asarray(x1, dtype=np.float64).ravel()
    if x1.shape != (p.d,):
        raise DimensionMismatch(f'Expected a start of length {p.d}, got {x1.shape}')
    x = broadcast(x1, p.m)
    grad = aggregate_gradient(p, x)
    if shift:
        grad = grad - shift * x
    return SolverState(t=1, x=x, y=x.copy(), z=x.copy(), s=grad, prev_grad=grad.copy())


def check_finite(state: SolverState, t: int):
    if not state.is_finite():
        raise NonFiniteState(
            f'Non-finite iterate at t={t}, the step size is probably too large', t=t)


def accelerated_step(state: SolverState,
                     w: GossipMatrix,
                     sched: Schedule,
                     gradient: GradientFn,
                     prox: ProxFn,
                     ) -> SolverState:
    """One iteration for a given (possibly shifted) gradient and prox"""
    t = state.t
    gamma, tau, k = sched.gamma(t), sched.tau(t), sched.K
    grads = GradLedger(state.grads.evaluations)
    comm = CommLedger(state.comm.rounds)

    def mix(a):
        return fast_mix(a, w, k, comm, sched.eta_override)

    x = tau * state.z + (1 - tau) * state.y
    grad = gradient(x, grads)
    s = mix(state.s + grad - state.prev_grad)
    z_hat = prox(gamma, state.z - gamma * s)
    z = mix(z_hat)
    y = mix(tau * z + (1 - tau) * state.y)

    result = SolverState(t=t + 1, x=x, y=y, z=z, s=s, prev_grad=grad,
                         grads=grads, comm=comm, z_hat=z_hat)
    check_finite(result, t)
    return result


@export
def odapg_step(state: SolverState,
               p: CompositeProblem,
               w: GossipMatrix,
               sched: Schedule,
               ) -> SolverState:
    """
    One iteration of the main algorithm

    :param state: current iterates at index t
    :param p: composite problem
    :param w: gossip matrix
    :param sched: a strongly_convex_g or general_convex_g schedule
    :return: iterates at index t + 1 (m gradients and 3K rounds charged)
    """
    if sched.regime not in MAIN_REGIMES:
        raise RegimeMismatch(f'odapg_step needs one of {MAIN_REGIMES}, got {sched.regime}')
    return accelerated_step(state, w, sched,
                            gradient=lambda x, counter: aggregate_gradient(p, x, counter),
                            prox=lambda gamma, v: aggregate_prox(p.reg, gamma, v))


@export
def odapg_extension_step(state: SolverState,
                         p: CompositeProblem,
                         w: GossipMatrix,
                         sched: Schedule,
                         ) -> SolverState:
    """
    One iteration for mu-strongly convex locals and a convex g.

    Tracks grad f_i - mu x and uses
    prox_{gamma/(1 + mu gamma) g}(v / (1 + mu gamma)), i.e. the main
    iteration applied to f_i - mu/2 ||.||^2 and g + mu/2 ||.||^2.
    """
    mu = sched.mu
    if p.reg.mu > 0:
        raise RegimeMismatch(f'The extension needs g without ridge, got mu={p.reg.mu}')
    if p.L < 2 * mu:
        raise RegimeMismatch(f'The extension needs L >= 2 mu, got L={p.L}, mu={mu}')
    return accelerated_step(state, w, sched,
                            gradient=_shifted_gradient(p, mu),
                            prox=_rescaled_prox(p, mu))
