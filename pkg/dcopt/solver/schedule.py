"""Step sizes, momentum weights and FastMix rounds of the solver variants"""
import typing as ty
from dataclasses import asdict, dataclass

import numpy as np

import dcopt
from dcopt.consensus import default_k
from dcopt.exceptions import RegimeMismatch

export, __all__ = dcopt.exporter()
__all__ += ['REGIMES', 'MAIN_REGIMES', 'C_F']

REGIMES = ('strongly_convex_g', 'general_convex_g', 'extension', 'baseline')
MAIN_REGIMES = ('strongly_convex_g', 'general_convex_g')
# constant of the increasing step size in the general convex regime
C_F = 200.0


@export
@dataclass(frozen=True)
class Schedule:
    """
    Parameters of one run.

    Constant-step regimes use gamma_const / tau_const. The general convex
    regime uses gamma_t = (t + 4) / (2 L c_f) and tau_t = 2 / (t + 4) unless
    overridden.

    :param regime: one of REGIMES
    :param L: smoothness constant the step sizes are derived from
    :param mu: strong convexity modulus used by the regime (reg.mu for the
        main regimes, the modulus of the locals for the extension)
    :param K: FastMix rounds per mixing call
    :param T: number of outer iterations
    :param gamma_const: constant step size, None for a t-dependent step
    :param tau_const: constant momentum weight, None for a t-dependent weight
    :param eta_override: FastMix momentum to use instead of eta_w (tests only)
    """
    regime: str
    L: float
    mu: float
    K: int
    T: int
    gamma_const: ty.Optional[float] = None
    tau_const: ty.Optional[float] = None
    eta_override: ty.Optional[float] = None
    c_f: float = C_F

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f'Unknown regime {self.regime}, choose from {REGIMES}')
        if self.K < 0 or self.T < 0:
            raise ValueError(f'K and T should be >= 0, got K={self.K}, T={self.T}')
        if self.gamma_const is not None and not self.gamma_const > 0:
            raise ValueError(f'Step size should be positive, got {self.gamma_const}')
        if self.tau_const is not None and not 0 < self.tau_const <= 1:
            raise ValueError(f'tau should be in (0, 1], got {self.tau_const}')

    def gamma(self, t: int) -> float:
        if self.gamma_const is not None:
            return self.gamma_const
        return (t + 4) / (2 * self.L * self.c_f)

    def tau(self, t: int) -> float:
        if self.tau_const is not None:
            return self.tau_const
        return 2 / (t + 4)

    @property
    def schedule_id(self) -> str:
        if self.gamma_const is not None and self.tau_const is not None:
            return f'{self.regime}:constant'
        return f'{self.regime}:(t+4)/(2*L*{self.c_f:g})'

    def to_dict(self) -> dict:
        result = asdict(self)
        result['schedule_id'] = self.schedule_id
        return result


@export
def make_schedule(regime: str,
                  problem: 'dcopt.CompositeProblem',
                  gap: float,
                  T: int,
                  K: ty.Optional[int] = None,
                  gamma: ty.Optional[float] = None,
                  tau: ty.Optional[float] = None,
                  eta_override: ty.Optional[float] = None,
                  ) -> Schedule:
    """
    Theoretical defaults of each regime with optional overrides

    - strongly_convex_g: gamma = 1 / (20 sqrt(L mu)), tau = mu gamma
    - general_convex_g: gamma_t = (t + 4) / (2 L c_f), tau_t = 2 / (t + 4)
    - extension: gamma = 1 / (20 sqrt((L - mu) mu)), tau = mu gamma with mu
      the modulus of the locals, requires L >= 2 mu and a convex g
    - baseline: gamma = 1 / (2 L), tau = 1
    """
    L = problem.L
    overridden = gamma is not None and tau is not None
    if regime == 'strongly_convex_g':
        mu = problem.mu
        if mu <= 0 and not overridden:
            raise RegimeMismatch('strongly_convex_g needs mu > 0, use general_convex_g')
        if not overridden:
            gamma = gamma if gamma is not None else 1 / (20 * np.sqrt(L * mu))
            tau = tau if tau is not None else mu * gamma
        k_regime = 'main'
    elif regime == 'general_convex_g':
        mu = problem.mu
        k_regime = 'main'
    elif regime == 'extension':
        mu = problem.local_mu
        if problem.reg.mu > 0:
            raise RegimeMismatch(
                f'The extension needs a convex g without ridge, got mu={problem.reg.mu}')
        if not overridden:
            if mu <= 0 or L < 2 * mu:
                raise RegimeMismatch(
                    f'The extension needs 0 < 2 mu <= L, got mu={mu}, L={L}')
            gamma = gamma if gamma is not None else 1 / (20 * np.sqrt((L - mu) * mu))
            tau = tau if tau is not None else mu * gamma
        k_regime = 'extension'
    elif regime == 'baseline':
        mu = problem.mu
        gamma = gamma if gamma is not None else 1 / (2 * L)
        tau = 1.0
        k_regime = 'main'
    else:
        raise ValueError(f'Unknown regime {regime}, choose from {REGIMES}')

    if K is None:
        K = default_k(gap, k_regime)
    return Schedule(regime=regime,
                    L=float(L),
                    mu=float(mu),
                    K=int(K),
                    T=int(T),
                    gamma_const=None if gamma is None else float(gamma),
                    tau_const=None if tau is None else float(tau),
                    eta_override=eta_override,
                    )
