"""Smooth convex local objectives f_i held by the agents"""
import typing as ty

import numpy as np
from scipy.special import expit

import dcopt
from dcopt.exceptions import DimensionMismatch, NonPSD

export, __all__ = dcopt.exporter()

PSD_TOL = 1e-10


@export
class SmoothLocal:
    """
    Base class of smooth convex local objectives. To use, subclass and set
    the required attributes and implement value and gradient.

    :param smoothness: a valid global Lipschitz constant L of the gradient
    :param strong_convexity: modulus of strong convexity (0 if only convex)
    :param dim: dimension d of the argument
    """
    smoothness: float = None
    strong_convexity: float = 0.0
    dim: int = None

    _required_settings = ('smoothness', 'strong_convexity', 'dim')

    def __repr__(self):
        return (f'{self.__class__.__name__}(d={self.dim}, L={self.smoothness:.4g}, '
                f'mu={self.strong_convexity:.4g})')

    def value(self, v: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_class(self):
        if missing := [att for att in self._required_settings
                       if getattr(self, att) is None]:
            raise NotImplementedError(f'Missing {missing} for {self}')
        if self.smoothness < 0 or self.strong_convexity < 0:
            raise ValueError(f'Invalid constants for {self}')

    def _check_input(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f'{self} expects a vector of length {self.dim}, got {v.shape}')
        return v


@export
class LogisticLocal(SmoothLocal):
    """
    Averaged logistic loss (1/n) sum_j log(1 + exp(-b_j <a_j, v>))

    The smoothness constant is the tight lambda_max(A^T A) / (4 n).
    """

    def __init__(self, features: np.ndarray, labels: np.ndarray):
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise DimensionMismatch(
                f'Features {features.shape} and labels {labels.shape} do not match')
        if features.shape[0] < 1:
            raise ValueError('Need at least one sample')
        self.features = features
        self.labels = labels
        self.n = features.shape[0]
        self.dim = features.shape[1]
        self.smoothness = float(np.linalg.norm(features, 2) ** 2 / (4 * self.n))
        self.strong_convexity = 0.0
        self._check_class()

    def margins(self, v) -> np.ndarray:
        return self.labels * (self.features @ self._check_input(v))

    def value(self, v) -> float:
        # log(1 + exp(-z)) without overflow for large |z|
        return float(np.mean(np.logaddexp(0.0, -self.margins(v))))

    def gradient(self, v) -> np.ndarray:
        weights = self.labels * expit(-self.margins(v))
        return -(self.features.T @ weights) / self.n


@export
class QuadraticLocal(SmoothLocal):
    """1/2 v^T Q v - b^T v with L = lambda_max(Q) and modulus lambda_min(Q)"""

    def __init__(self, q: np.ndarray, b: np.ndarray):
        q = np.asarray(q, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or b.shape != (q.shape[0],):
            raise DimensionMismatch(f'Q {q.shape} and b {b.shape} do not match')
        scale = max(1.0, float(np.max(np.abs(q), initial=0.0)))
        if np.max(np.abs(q - q.T), initial=0.0) > 1e-12 * scale:
            raise NonPSD('Q is not symmetric')
        eigenvalues = np.linalg.eigvalsh(q)
        if eigenvalues[0] < -PSD_TOL * scale:
            raise NonPSD(f'Q has a negative eigenvalue {eigenvalues[0]:.3g}')
        self.q = q
        self.b = b
        self.dim = q.shape[0]
        self.smoothness = float(max(eigenvalues[-1], 0.0))
        self.strong_convexity = float(max(eigenvalues[0], 0.0))
        self._check_class()

    def value(self, v) -> float:
        v = self._check_input(v)
        return float(0.5 * v @ self.q @ v - self.b @ v)

    def gradient(self, v) -> np.ndarray:
        return self.q @ self._check_input(v) - self.b


@export
class ShiftedLocal(SmoothLocal):
    """
    f(v) + (shift / 2) ||v||^2

    A negative shift removes curvature: for a mu-strongly convex, L-smooth f,
    ShiftedLocal(f, -mu) is convex and (L - mu)-smooth.
    """

    def __init__(self, base: SmoothLocal, shift: float):
        self.base = base
        self.shift = float(shift)
        self.dim = base.dim
        self.smoothness = base.smoothness + self.shift
        self.strong_convexity = base.strong_convexity + self.shift
        if self.strong_convexity < -1e-12 * max(1.0, abs(self.shift)):
            raise ValueError(
                f'Shifting {base} by {shift} gives a non-convex function')
        self.strong_convexity = max(self.strong_convexity, 0.0)
        self._check_class()

    def value(self, v) -> float:
        v = self._check_input(v)
        return self.base.value(v) + 0.5 * self.shift * float(v @ v)

    def gradient(self, v) -> np.ndarray:
        v = self._check_input(v)
        return self.base.gradient(v) + self.shift * v


@export
def logistic_local(data, labels: ty.Optional[np.ndarray] = None) -> LogisticLocal:
    """
    Logistic loss of one agent

    :param data: the agent's Dataset shard, or its feature matrix if labels
        are passed separately
    :param labels: labels in {-1, +1} when data is a feature matrix
    """
    if labels is None:
        return LogisticLocal(data.features, data.labels)
    return LogisticLocal(data, labels)


@export
def quadratic_local(q: np.ndarray, b: np.ndarray) -> QuadraticLocal:
    return QuadraticLocal(q, b)


@export
def random_quadratic_locals(m: int,
                            d: int,
                            smoothness: float,
                            seed: int,
                            strong_convexity: float = 0.0,
                            ) -> ty.List[QuadraticLocal]:
    """
    Random quadratics whose spectra lie in [strong_convexity, smoothness]

    Agent 0 attains the upper end so that max_i L_i equals smoothness exactly
    (up to rounding).
    """
    if not 0 <= strong_convexity <= smoothness:
        raise ValueError(f'Need 0 <= {strong_convexity} <= {smoothness}')
    rng = np.random.default_rng(seed)
    result = []
    for i in range(m):
        basis, _ = np.linalg.qr(rng.standard_normal((d, d)))
        eigenvalues = rng.uniform(strong_convexity, smoothness, size=d)
        eigenvalues[0] = smoothness if i == 0 else eigenvalues[0]
        eigenvalues[-1] = strong_convexity
        q = (basis * eigenvalues) @ basis.T
        result.append(QuadraticLocal(0.5 * (q + q.T), rng.standard_normal(d)))
    return result
