"""Non-accelerated decentralized proximal gradient with gradient tracking"""
import typing as ty

import dcopt
from dcopt.consensus import CommLedger, fast_mix
from dcopt.objective.problem import (CompositeProblem, GradLedger, aggregate_gradient,
                                     aggregate_prox)
from dcopt.solver.odapg import check_finite
from dcopt.solver.state import SolverState
from dcopt.topology import GossipMatrix

export, __all__ = dcopt.exporter()


@export
def baseline_proxgt_step(state: SolverState,
                         p: CompositeProblem,
                         w: GossipMatrix,
                         gamma: float,
                         K: int,
                         eta_override: ty.Optional[float] = None,
                         ) -> SolverState:
    """
    The accelerated iteration with tau = 1: gradients are taken at z and y
    is dropped (y is set to z for the diagnostics). Charges m gradients and
    2K rounds.
    """
    if gamma <= 0:
        raise ValueError(f'Step size should be positive, got {gamma}')
    if gamma > 1 / (2 * p.L) * (1 + 1e-12):
        dcopt.utils.log.warning(f'Baseline step {gamma:.3g} exceeds 1/(2L)={1 / (2 * p.L):.3g}')
    grads = GradLedger(state.grads.evaluations)
    comm = CommLedger(state.comm.rounds)

    x = state.z
    grad = aggregate_gradient(p, x, grads)
    s = fast_mix(state.s + grad - state.prev_grad, w, K, comm, eta_override)
    z_hat = aggregate_prox(p.reg, gamma, x - gamma * s)
    z = fast_mix(z_hat, w, K, comm, eta_override)

    result = SolverState(t=state.t + 1, x=x.copy(), y=z.copy(), z=z, s=s, prev_grad=grad,
                         grads=grads, comm=comm, z_hat=z_hat)
    check_finite(result, state.t)
    return result
