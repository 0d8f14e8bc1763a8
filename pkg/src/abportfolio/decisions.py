"""Ship/no-ship thresholds, their p-value equivalents, cost and
risk-aversion inversions, and the prior-free minimax rule."""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import log_ndtr

from ._numerics import bisect_increasing, golden_section_max, norm_cdf, norm_pdf, norm_ppf, norm_sf
from .exceptions import InfiniteRiskError
from .priors import (
    DEFAULT_QUAD_ORDER,
    GaussianPrior,
    Linear,
    posterior_moments_gaussian,
)
from .production import ship_cutoff


@dataclass(frozen=True)
class DecisionThreshold:
    """Ship iff ``delta_hat >= cutoff_delta_hat``, equivalently iff the
    t-statistic reaches ``t_statistic``, equivalently iff the one-sided
    p-value ``1 - Phi(delta_hat sqrt(n) / sigma)`` is at most ``one_sided_alpha``.
    """

    cutoff_delta_hat: float
    t_statistic: float
    one_sided_alpha: float
    n: float
    sigma: float
    saturation: Optional[str] = None

    @classmethod
    def from_cutoff(cls, cutoff, n, sigma, saturation=None):
        t = cutoff * math.sqrt(n) / sigma
        return cls(cutoff, t, norm_sf(t), n, sigma, saturation)

    @classmethod
    def from_alpha(cls, alpha, n, sigma):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
        t = norm_ppf(1.0 - alpha)
        return cls(t * sigma / math.sqrt(n), t, alpha, n, sigma)

    def ships(self, delta_hat):
        return np.asarray(delta_hat) >= self.cutoff_delta_hat

    def ships_by_p_value(self, delta_hat):
        """``p <= alpha`` compared through log tail areas of the
        better-conditioned tail, so the comparison survives where ``alpha``
        or ``p`` round to 0 or 1."""
        if self.saturation is not None:
            return self.saturation == "always"
        t = float(delta_hat) * math.sqrt(self.n) / self.sigma
        if self.t_statistic > 0:
            return log_ndtr(-t) <= log_ndtr(-self.t_statistic)
        return log_ndtr(t) >= log_ndtr(self.t_statistic)

    def p_value(self, delta_hat):
        return norm_sf(np.asarray(delta_hat, dtype=float) * math.sqrt(self.n) / self.sigma)

    def as_dict(self):
        return {
            "cutoff": self.cutoff_delta_hat,
            "t_stat": self.t_statistic,
            "alpha": self.one_sided_alpha,
            "saturation": self.saturation,
        }


def optimal_threshold_gaussian_linear(prior, noise, n):
    """Closed-form optimal threshold for a Gaussian prior and linear utility:
    cutoff ``-mu sigma**2 / (n tau**2)``, t-statistic ``-mu sigma / (tau**2 sqrt(n))``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    cutoff = -prior.mu * noise.sigma ** 2 / (n * prior.tau ** 2)
    t = -prior.mu * noise.sigma / (prior.tau ** 2 * math.sqrt(n))
    return DecisionThreshold(cutoff, t, norm_sf(t), n, noise.sigma)


def optimal_threshold_generic(prior, noise, n, u=None, s=0.0, quad_order=DEFAULT_QUAD_ORDER):
    """Optimal threshold for any prior, increasing utility and implementation
    cost ``s``, found by bisection on the posterior expected utility.

    When no root lies within 12 marginal s.d. of the mean, the threshold
    saturates: ``saturation="never"`` (alpha 0) or ``"always"`` (alpha 1).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    u = Linear() if u is None else u
    cutoff, sat = ship_cutoff(prior, noise, n, u, s, quad_order)
    if sat == "never":
        return DecisionThreshold(math.inf, math.inf, 0.0, n, noise.sigma, sat)
    if sat == "always":
        return DecisionThreshold(-math.inf, -math.inf, 1.0, n, noise.sigma, sat)
    return DecisionThreshold.from_cutoff(cutoff, n, noise.sigma)


def loss_averse_ratio(b, tol=1e-14):
    """Root ``r`` of ``r (1 + b Phi(-r)) - b phi(r) = 0``.

    With posterior ``N(m, s**2)`` the loss-averse expected utility is
    ``s * h(m / s)`` for this ``h``, so shipping requires ``m / s >= r``.
    """
    if b == 0:
        return 0.0

    def h(r):
        return r * (1.0 + b * norm_sf(r)) - b * norm_pdf(r)

    hi = 1.0
    while h(hi) < 0:
        hi *= 2.0
    return bisect_increasing(h, 0.0, hi, tol)


def loss_averse_cutoff_gaussian(prior, noise, n, b):
    """Optimal observed-effect cutoff under ``u(x) = x + b x 1{x<0}``, solved
    in the standardized posterior-mean coordinate and mapped back."""
    _, s2 = posterior_moments_gaussian(prior, noise, n, 0.0)
    m_star = loss_averse_ratio(b) * math.sqrt(s2)
    tau2 = prior.tau ** 2
    se2 = noise.sigma ** 2 / n
    return (m_star - prior.mu * se2 / (tau2 + se2)) * (tau2 + se2) / tau2


def pass_probability(prior, noise, n):
    """Marginal probability that a test clears the optimal linear-utility
    cutoff: ``Phi((mu / tau**2) sqrt(tau**2 + sigma**2 / n))``."""
    if np.any(np.asarray(n) < 1):
        raise ValueError(f"n must be >= 1, got {n!r}")
    return norm_cdf(prior.mu / prior.tau ** 2 * np.sqrt(prior.tau ** 2 + noise.sigma ** 2 / np.asarray(n, dtype=float)))


def ship_probability(prior, noise, n, cutoff):
    """Marginal probability that ``delta_hat >= cutoff`` for any prior."""
    if cutoff == math.inf:
        return 0.0
    if cutoff == -math.inf:
        return 1.0
    se = noise.sigma / math.sqrt(n)
    if isinstance(prior, GaussianPrior):
        return norm_sf((cutoff - prior.mu) / math.sqrt(prior.tau ** 2 + se * se))
    return float(np.dot(prior.weights, norm_sf((cutoff - prior.values) / se)))


def implied_cost_for_alpha(prior, noise, n, target_alpha):
    """Implementation cost ``s`` under which shipping at one-sided level
    ``target_alpha`` is optimal (linear utility).

    The level fixes the cutoff ``c = sigma Phi^-1(1 - alpha) / sqrt(n)``, and
    the optimal rule ships exactly when the posterior mean clears ``s``, so
    ``s`` is the posterior mean at ``c``.
    """
    if not 0.0 < target_alpha < 1.0:
        raise ValueError(f"target_alpha must lie in (0, 1), got {target_alpha!r}")
    c = noise.sigma * norm_ppf(1.0 - target_alpha) / math.sqrt(n)
    m, _ = posterior_moments_gaussian(prior, noise, n, c)
    return m


def _alpha_for_b(prior, noise, n, b):
    c = loss_averse_cutoff_gaussian(prior, noise, n, b)
    return norm_sf(c * math.sqrt(n) / noise.sigma)


def implied_b_for_alpha(prior, noise, n, target_alpha, b_cap=1e6, rel_tol=1e-6):
    """Loss-aversion ``b`` whose optimal threshold has level ``target_alpha``.

    The optimal level falls as ``b`` grows, so only levels at or below the
    linear-utility optimum are attainable. Brackets by doubling from 1 up
    to ``b_cap``, then bisects to ``rel_tol`` relative in ``b``.
    """
    if not 0.0 < target_alpha < 1.0:
        raise ValueError(f"target_alpha must lie in (0, 1), got {target_alpha!r}")
    alpha0 = optimal_threshold_gaussian_linear(prior, noise, n).one_sided_alpha
    if abs(target_alpha - alpha0) <= 1e-12:
        return 0.0
    if target_alpha > alpha0:
        raise ValueError(
            f"target_alpha={target_alpha:.6g} not attainable: levels in "
            f"[{_alpha_for_b(prior, noise, n, b_cap):.6g}, {alpha0:.6g}] correspond to b in [0, {b_cap:g}]"
        )
    hi = 1.0
    while _alpha_for_b(prior, noise, n, hi) > target_alpha:
        if hi >= b_cap:
            raise ValueError(
                f"target_alpha={target_alpha:.6g} not attainable: levels in "
                f"[{_alpha_for_b(prior, noise, n, b_cap):.6g}, {alpha0:.6g}] correspond to b in [0, {b_cap:g}]"
            )
        hi = min(2.0 * hi, b_cap)
    lo = 0.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _alpha_for_b(prior, noise, n, mid) > target_alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- minimax --------------------------------------------------------------------


def minimax_rule(delta_hat):
    """Prior-free minimax decision: ship iff the observed effect is >= 0."""
    return np.asarray(delta_hat) >= 0 if np.ndim(delta_hat) else bool(delta_hat >= 0)


@lru_cache(maxsize=1)
def minimax_constant():
    """``(C, nu_star)`` with ``C = max_{nu > 0} nu (1 - Phi(nu))``."""
    nu, c, _ = golden_section_max(lambda v: v * norm_sf(v), 0.0, 5.0, tol=1e-10)
    return c, nu


def minimax_risk(allocations, noise):
    """Worst-case regret of the minimax rule, ``sum_i C sigma / sqrt(n_i)``."""
    n = np.asarray(allocations, dtype=float)
    if np.any(n <= 0):
        raise InfiniteRiskError("every idea needs n_i >= 1; an untested idea has infinite minimax risk")
    c, _ = minimax_constant()
    return float(c * noise.sigma * np.sum(1.0 / np.sqrt(np.sort(n))))
