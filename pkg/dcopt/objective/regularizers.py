"""Proximable convex regularizers g shared by all agents"""
import numba
import numpy as np

import dcopt

export, __all__ = dcopt.exporter()


@numba.njit
def _soft_threshold_flat(values, threshold):
    result = np.empty_like(values)
    for i in range(values.shape[0]):
        v = values[i]
        if v > threshold:
            result[i] = v - threshold
        elif v < -threshold:
            result[i] = v + threshold
        else:
            result[i] = 0.0
    return result


@export
def soft_threshold(v, threshold: float) -> np.ndarray:
    """Elementwise sign(v) max(|v| - threshold, 0)"""
    v = np.asarray(v, dtype=np.float64)
    flat = np.ascontiguousarray(v).reshape(-1)
    return _soft_threshold_flat(flat, float(threshold)).reshape(v.shape)


@export
class Regularizer:
    """
    Base class for regularizers. Subclasses implement value and prox, where
    prox(gamma, v) = argmin_u g(u) + ||u - v||^2 / (2 gamma).

    :param mu: strong convexity modulus of g
    """
    mu: float = 0.0

    def value(self, v: np.ndarray) -> float:
        raise NotImplementedError

    def prox(self, gamma: float, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def prox_rows(self, gamma: float, x: np.ndarray) -> np.ndarray:
        """Apply the prox to each row of an m x d matrix"""
        x = np.asarray(x, dtype=np.float64)
        return np.vstack([self.prox(gamma, row) for row in x])


@export
class ElasticNet(Regularizer):
    """sigma ||v||_1 + (mu / 2) ||v||^2"""

    def __init__(self, sigma: float = 0.0, mu: float = 0.0):
        if sigma < 0 or mu < 0:
            raise ValueError(f'Need sigma >= 0 and mu >= 0, got sigma={sigma}, mu={mu}')
        self.sigma = float(sigma)
        self.mu = float(mu)

    def __repr__(self):
        return f'ElasticNet(sigma={self.sigma:.4g}, mu={self.mu:.4g})'

    def value(self, v) -> float:
        v = np.asarray(v, dtype=np.float64)
        return float(self.sigma * np.sum(np.abs(v)) + 0.5 * self.mu * np.sum(v ** 2))

    def prox(self, gamma: float, v) -> np.ndarray:
        if gamma <= 0:
            raise ValueError(f'Prox step should be positive, got {gamma}')
        return soft_threshold(v, gamma * self.sigma) / (1 + gamma * self.mu)

    def prox_rows(self, gamma, x) -> np.ndarray:
        # elementwise, so the matrix can be handled in one go
        return self.prox(gamma, x)


@export
class RidgeAugmented(Regularizer):
    """
    base(v) + (mu / 2) ||v||^2 for any proximable base, using
    prox_{gamma (g + mu/2 ||.||^2)}(v) = prox_{gamma' g}(v / (1 + mu gamma))
    with gamma' = gamma / (1 + mu gamma).
    """

    def __init__(self, base: Regularizer, mu: float):
        if mu < 0:
            raise ValueError(f'Ridge weight should be >= 0, got {mu}')
        self.base = base
        self.ridge = float(mu)
        self.mu = base.mu + self.ridge

    def __repr__(self):
        return f'RidgeAugmented({self.base!r}, mu={self.ridge:.4g})'

    def value(self, v) -> float:
        v = np.asarray(v, dtype=np.float64)
        return self.base.value(v) + 0.5 * self.ridge * float(np.sum(v ** 2))

    def prox(self, gamma, v) -> np.ndarray:
        if gamma <= 0:
            raise ValueError(f'Prox step should be positive, got {gamma}')
        scale = 1 + self.ridge * gamma
        return self.base.prox(gamma / scale, np.asarray(v, dtype=np.float64) / scale)

    def prox_rows(self, gamma, x) -> np.ndarray:
        scale = 1 + self.ridge * gamma
        return self.base.prox_rows(gamma / scale, np.asarray(x, dtype=np.float64) / scale)


@export
def elastic_net(sigma: float, mu: float) -> ElasticNet:
    return ElasticNet(sigma, mu)


@export
def zero_regularizer() -> ElasticNet:
    return ElasticNet(0.0, 0.0)
