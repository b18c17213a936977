"""Centralized solvers on the averaged objective, used as ground truth and as test oracle"""
import typing as ty
from dataclasses import dataclass

import numpy as np

import dcopt
from dcopt.exceptions import NoConvergence
from dcopt.objective.problem import CompositeProblem

export, __all__ = dcopt.exporter()
log = dcopt.utils.log


@export
@dataclass(frozen=True, eq=False)
class Reference:
    """
    Minimizer estimate x* and F* = F(x*). Unpacks as (x, value).

    :param residual: gradient mapping norm at termination
    :param tol: the tolerance it was computed with
    """
    x: np.ndarray
    value: float
    residual: float
    iterations: int
    tol: float

    def __iter__(self):
        return iter((self.x, self.value))


def _mapping(p: CompositeProblem, point: np.ndarray, step: float) -> ty.Tuple[np.ndarray, float]:
    """Proximal gradient step from point and the gradient mapping norm there"""
    new = p.reg.prox(step, point - step * p.average_gradient(point))
    return new, float(np.linalg.norm(point - new) / step)


@export
def centralized_reference(p: CompositeProblem,
                          tol: float = 1e-10,
                          cap: int = 100_000,
                          x0: ty.Optional[np.ndarray] = None,
                          ) -> Reference:
    """
    Accelerated proximal gradient with gradient-based adaptive restart on
    f_bar = (1/m) sum_i f_i and g, with step 1 / L.

    Stops when the gradient mapping norm L ||v - prox_{g/L}(v - grad f_bar(v)/L)||
    at the extrapolated point v is at most tol.

    :param tol: target gradient mapping norm, the floating point floor is of
        the order 1e-14 times the gradient scale
    :param cap: maximum number of iterations
    :param x0: start, zero by default
    :raises NoConvergence: with the achieved residual and the last iterate
    """
    if tol <= 0:
        raise ValueError(f'Tolerance should be positive, got {tol}')
    if p.L <= 0:
        raise ValueError(f'Need a positive smoothness constant, got L={p.L}')
    step = 1 / p.L
    x = np.zeros(p.d) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    v = x.copy()
    theta = 1.0
    residual = np.inf
    for iteration in range(1, cap + 1):
        x_new, residual = _mapping(p, v, step)
        if residual <= tol:
            value = p.value(x_new)
            log.debug(f'Reference converged after {iteration} iterations, '
                      f'residual {residual:.2e}, F*={value:.15g}')
            return Reference(x_new, value, residual, iteration, tol)
        if np.dot(v - x_new, x_new - x) > 0:
            # momentum points uphill, restart
            theta = 1.0
            v = x_new
        else:
            theta_new = (1 + np.sqrt(1 + 4 * theta ** 2)) / 2
            v = x_new + ((theta - 1) / theta_new) * (x_new - x)
            theta = theta_new
        x = x_new
    raise NoConvergence(
        f'Reference solver reached {cap} iterations with residual {residual:.3g} > {tol:.3g}',
        residual=residual, x=x)


@export
def centralized_step(y: np.ndarray,
                     z: np.ndarray,
                     p: CompositeProblem,
                     gamma: float,
                     tau: float,
                     ) -> ty.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Single-agent accelerated proximal gradient step on f_bar + g

    x = tau z + (1 - tau) y, z+ = prox_{gamma g}(z - gamma grad f_bar(x)),
    y+ = tau z+ + (1 - tau) y

    :return: x, y+, z+
    """
    x = tau * z + (1 - tau) * y
    z_new = p.reg.prox(gamma, z - gamma * p.average_gradient(x))
    y_new = tau * z_new + (1 - tau) * y
    return x, y_new, z_new
