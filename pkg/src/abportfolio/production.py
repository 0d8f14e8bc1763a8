"""Production functions: expected return per tested idea as a function of
its allocation ``n``, under the optimal ship rule and under fixed rules."""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from ._numerics import bisect_increasing, golden_section_max, norm_cdf, norm_pdf, norm_sf
from .exceptions import BracketError
from .priors import (
    DEFAULT_QUAD_ORDER,
    DiscretePrior,
    GaussianPrior,
    Linear,
    check_utility_for_prior,
    marginal_moments,
    posterior_expected_utility,
    prior_expected_utility,
)

CUTOFF_BRACKET_SDS = 12.0


# --- costs --------------------------------------------------------------------


class TestingCost:
    def __call__(self, n):
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroTestingCost(TestingCost):
    def __call__(self, n):
        return 0.0


@dataclass(frozen=True)
class FixedTestingCost(TestingCost):
    """Flat cost ``c`` charged for every test that receives units."""

    c: float

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise ValueError(f"fixed testing cost must be finite and >= 0, got {self.c!r}")

    def __call__(self, n):
        return self.c if n > 0 else 0.0


@dataclass(frozen=True, eq=False)
class CustomTestingCost(TestingCost):
    func: Callable

    def __post_init__(self):
        if self.func(0) != 0:
            raise ValueError("testing cost must vanish at n = 0")
        grid = np.concatenate([[0.0], np.logspace(0, 9, 91)])
        vals = np.array([float(self.func(x)) for x in grid])
        if np.any(vals < 0) or np.any(np.diff(vals) < 0):
            raise ValueError("testing cost must be non-negative and non-decreasing in n")

    def __call__(self, n):
        return float(self.func(n))


@dataclass(frozen=True)
class CostModel:
    """Implementation cost paid on shipping plus a testing cost ``t(n)``."""

    implementation: float = 0.0
    testing: TestingCost = field(default_factory=ZeroTestingCost)

    def __post_init__(self):
        if not (self.implementation >= 0 and math.isfinite(self.implementation)):
            raise ValueError(f"implementation cost must be >= 0, got {self.implementation!r}")

    @property
    def is_zero(self):
        return self.implementation == 0 and isinstance(self.testing, ZeroTestingCost)


@dataclass(frozen=True)
class ProductionHandle:
    """A prior, noise scale, utility and cost model: evaluable as ``f(n)``."""

    prior: object
    noise: object
    utility: object = field(default_factory=Linear)
    cost: CostModel = field(default_factory=CostModel)
    quad_order: int = DEFAULT_QUAD_ORDER

    def __post_init__(self):
        check_utility_for_prior(self.utility, self.prior)

    @property
    def closed_form(self):
        return isinstance(self.prior, GaussianPrior) and self.utility.is_linear

    def __call__(self, n):
        """Evaluate ``f`` at a scalar or an array of allocations."""
        if np.ndim(n) == 0:
            return self._eval_scalar(float(n))
        n = np.asarray(n, dtype=float)
        if self.closed_form:
            return _gaussian_linear_value(self.prior, self.noise, n, self.cost.implementation) - np.array(
                [self.cost.testing(x) for x in n.ravel()]
            ).reshape(n.shape)
        return np.array([self._eval_scalar(x) for x in n.ravel()]).reshape(n.shape)

    def _eval_scalar(self, n):
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n!r}")
        if self.closed_form:
            return float(_gaussian_linear_value(self.prior, self.noise, n, self.cost.implementation)) - (
                self.cost.testing(n)
            )
        return production_generic(self, n)


# --- closed forms -------------------------------------------------------------


def _gaussian_linear_value(prior, noise, n, s):
    """``E[(E[delta | delta_hat] - s)^+]`` for a Gaussian prior, vectorized.

    The posterior mean is normal with mean ``mu`` and s.d. ``tau**2 / sqrt(v)``,
    ``v = tau**2 + sigma**2 / n``; n = 0 yields 0 by convention.
    """
    n = np.asarray(n, dtype=float)
    pos = n > 0
    safe_n = np.where(pos, n, 1.0)
    v = prior.tau ** 2 + noise.sigma ** 2 / safe_n
    sd = prior.tau ** 2 / np.sqrt(v)
    a = (prior.mu - s) / sd
    out = np.where(pos, sd * norm_pdf(a) + (prior.mu - s) * norm_cdf(a), 0.0)
    return out if out.ndim else float(out)


def production_gaussian_linear(prior, noise, n):
    """Production function for a Gaussian prior and linear utility.

    ``f(n) = (tau**2 / sqrt(v)) * phi(mu sqrt(v) / tau**2) + mu * Phi(mu sqrt(v) / tau**2)``
    with ``v = tau**2 + sigma**2 / n`` and ``f(0) = 0``.
    """
    if np.any(np.asarray(n) < 0):
        raise ValueError(f"n must be >= 0, got {n!r}")
    n = np.asarray(n, dtype=float)
    pos = n > 0
    v = prior.tau ** 2 + noise.sigma ** 2 / np.where(pos, n, 1.0)
    a = prior.mu / prior.tau ** 2 * np.sqrt(v)
    out = np.where(pos, prior.tau ** 2 / np.sqrt(v) * norm_pdf(a) + prior.mu * norm_cdf(a), 0.0)
    return out if out.ndim else float(out)


def production_pvalue_rule(prior, noise, n, z=1.96):
    """Expected return ``E[delta * 1{delta_hat >= z sigma / sqrt(n)}]`` of the
    fixed significance rule. ``z = 1.96`` reproduces the customary p < 0.05
    comparison; pass ``1.645`` for an exact one-sided 5% test."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    if math.isinf(z):
        return 0.0 if z > 0 else prior.mean
    c = z * noise.sigma / math.sqrt(n)
    if isinstance(prior, GaussianPrior):
        sm = math.sqrt(prior.tau ** 2 + noise.sigma ** 2 / n)
        r = (c - prior.mu) / sm
        return prior.mu * norm_sf(r) + prior.tau ** 2 / sm * norm_pdf(r)
    se = noise.sigma / math.sqrt(n)
    return float(np.dot(prior.weights, prior.values * norm_sf((c - prior.values) / se)))


# --- generic evaluation ---------------------------------------------------------


def ship_cutoff(prior, noise, n, u=None, s=0.0, quad_order=DEFAULT_QUAD_ORDER):
    """Observed-effect cutoff above which shipping is optimal.

    Solves ``E[u(delta) | delta_hat = c] = s`` by bisection inside
    ``mean +/- 12`` marginal s.d.; the posterior expectation is monotone in
    ``c`` so the root is unique. Returns ``(cutoff, saturation)`` where
    saturation is ``None``, ``"never"`` (cutoff = +inf) or ``"always"``
    (cutoff = -inf).
    """
    u = Linear() if u is None else u
    mean, sd = marginal_moments(prior, noise, n)
    lo, hi = mean - CUTOFF_BRACKET_SDS * sd, mean + CUTOFF_BRACKET_SDS * sd

    def g(c):
        return posterior_expected_utility(prior, noise, n, c, u, quad_order) - s

    if g(hi) < 0:
        return math.inf, "never"
    if g(lo) >= 0:
        return -math.inf, "always"
    # tolerance in standard-error units keeps the implied t-statistic and
    # level accurate when sigma / sqrt(n) is small against the prior spread
    xtol = 1e-12 * noise.sigma / math.sqrt(n)
    return bisect_increasing(g, lo, hi, xtol), None


@dataclass(frozen=True)
class ProductionEvaluation:
    value: float
    cutoff: float
    saturation: Optional[str]


def evaluate_production(handle, n):
    """``f(n)`` plus the ship cutoff and saturation flag used to compute it.

    The outer expectation runs only over the ship region ``delta_hat >= c``,
    so the integrand is smooth: adaptive quadrature over the marginal law of
    ``delta_hat`` for Gaussian priors, an exact atom sum for discrete ones.
    """
    prior, noise, u = handle.prior, handle.noise, handle.utility
    s = handle.cost.implementation
    t = handle.cost.testing(n)
    if n == 0:
        return ProductionEvaluation(0.0, math.nan, None)
    c, sat = ship_cutoff(prior, noise, n, u, s, handle.quad_order)
    if sat == "never":
        return ProductionEvaluation(-t, c, sat)
    if sat == "always":
        return ProductionEvaluation(prior_expected_utility(prior, u, handle.quad_order) - s - t, c, sat)
    return ProductionEvaluation(_region_value(handle, n, c) - t, c, None)


def _region_value(handle, n, c, closed=False):
    """``E[(E[u(delta) | delta_hat] - s) 1{delta_hat >= c}]`` for finite ``c``;
    quadrature unless ``closed`` (Gaussian prior, linear utility only)."""
    prior, noise, u = handle.prior, handle.noise, handle.utility
    s = handle.cost.implementation
    if isinstance(prior, DiscretePrior):
        se = noise.sigma / math.sqrt(n)
        gains = np.asarray(u(prior.values), dtype=float) - s
        return float(np.dot(prior.weights, gains * norm_sf((c - prior.values) / se)))
    mean, sd = marginal_moments(prior, noise, n)
    zc = (c - mean) / sd
    if closed:
        return (prior.mu - s) * norm_sf(zc) + prior.tau ** 2 / sd * norm_pdf(zc)

    def integrand(z):
        peu = posterior_expected_utility(prior, noise, n, mean + sd * z, u, handle.quad_order)
        return (peu - s) * norm_pdf(z)

    value, _ = integrate.quad(integrand, max(zc, -14.0), max(zc, 0.0) + 14.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


def rule_value(handle, n, cutoff):
    """Expected return of the fixed rule "ship iff ``delta_hat >= cutoff``"
    under the handle's prior, utility and costs (``-t(n)`` included)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    t = handle.cost.testing(n)
    if cutoff == math.inf:
        return -t
    if cutoff == -math.inf:
        return prior_expected_utility(handle.prior, handle.utility, handle.quad_order) - handle.cost.implementation - t
    return _region_value(handle, n, cutoff, closed=handle.closed_form) - t


def production_generic(handle, n, quad_order=None):
    """``f(n) = E[(E[u(delta) | delta_hat; n] - s)^+] - t(n)`` for any handle."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n!r}")
    if quad_order is not None and quad_order != handle.quad_order:
        handle = ProductionHandle(handle.prior, handle.noise, handle.utility, handle.cost, quad_order)
    return evaluate_production(handle, n).value


# --- Monte Carlo ---------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    samples: int


_MC_CHUNK = 1 << 20


def production_monte_carlo(handle, n, rule="optimal", samples=100_000, seed=0, z=1.96):
    """Simulate ``delta ~ G``, ``delta_hat ~ N(delta, sigma**2/n)``, apply a
    ship rule and average the realized ``u(delta) - s`` (minus ``t(n)``).

    ``rule`` is ``"optimal"`` (posterior expected utility above ``s``),
    ``"pvalue"`` (ship when ``delta_hat >= z sigma / sqrt(n)``) or
    ``"minimax"`` (ship when ``delta_hat >= 0``). Deterministic in ``seed``.
    """
    if samples < 1000:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    prior, noise, u = handle.prior, handle.noise, handle.utility
    s = handle.cost.implementation
    if rule == "optimal":
        cutoff, _ = ship_cutoff(prior, noise, n, u, s, handle.quad_order)
    elif rule == "pvalue":
        cutoff = z * noise.sigma / math.sqrt(n)
    elif rule == "minimax":
        cutoff = 0.0
    else:
        raise ValueError(f"unknown rule {rule!r}")
    rng = np.random.default_rng(seed)
    se = noise.sigma / math.sqrt(n)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        k = min(_MC_CHUNK, samples - done)
        delta = prior.sample(rng, k)
        delta_hat = delta + se * rng.standard_normal(k)
        gain = np.where(delta_hat >= cutoff, np.asarray(u(delta), dtype=float) - s, 0.0)
        total += math.fsum(gain)
        total_sq += math.fsum(gain * gain)
        done += k
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return MonteCarloEstimate(mean - handle.cost.testing(n), math.sqrt(var / samples), samples)


# --- structural points -----------------------------------------------------------


@dataclass(frozen=True)
class ProductionAnalysis:
    """Location of the convex/concave breakpoint ``x_hat`` and of ``x_star``,
    the maximizer of return per unit ``f(x) / x``.

    ``boundary`` is ``"left"`` when the ratio is maximized at the lower end
    of the search interval (e.g. a zero-mean prior, where ``f(x)/x`` is
    decreasing everywhere).
    """

    x_hat: float
    x_star: float
    f_at_x_star: float
    ratio_at_x_star: float
    x_star_tol: float
    x_hat_tol: float
    boundary: Optional[str]
    handle: ProductionHandle = field(repr=False)


def _second_difference(f, x):
    h = min(max(1.0, x / 1e3), x / 2.0)
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def find_x_star(handle, bracket_hi, eps=1.0, rel_tol=1e-6):
    """Maximize ``f(x)/x`` over ``[eps, bracket_hi]`` and locate ``x_hat``.

    The ratio is unimodal, so golden-section search in ``log x`` is exact up
    to ``rel_tol`` (relative in ``x``). ``x_hat`` is the sign change of a
    central second difference of ``f`` found by scanning down from
    ``x_star`` and bisecting.
    """
    if bracket_hi <= eps:
        raise ValueError(f"bracket_hi must exceed {eps}, got {bracket_hi!r}")

    def ratio_log(t):
        x = math.exp(t)
        return handle(x) / x

    lo_t, hi_t = math.log(eps), math.log(bracket_hi)
    t_star, ratio, width = golden_section_max(ratio_log, lo_t, hi_t, tol=rel_tol)
    if t_star == hi_t or ratio_log(hi_t) >= ratio_log(hi_t - 10 * rel_tol):
        raise BracketError(
            f"x* beyond bracket: f(x)/x still increasing at {bracket_hi:.6g} "
            f"(ratio {ratio_log(hi_t):.6g} vs {ratio_log(hi_t - 10 * rel_tol):.6g} just below)"
        )
    boundary = "left" if t_star == lo_t else None
    x_star = math.exp(t_star)

    x_hat, x_hat_tol = _find_x_hat(handle, x_star, rel_tol)
    return ProductionAnalysis(
        x_hat=x_hat,
        x_star=x_star,
        f_at_x_star=handle(x_star),
        ratio_at_x_star=ratio,
        x_star_tol=x_star * (math.exp(width) - 1.0),
        x_hat_tol=x_hat_tol,
        boundary=boundary,
        handle=handle,
    )


def _find_x_hat(handle, x_star, rel_tol):
    grid = np.geomspace(x_star, max(x_star * 1e-6, 1e-6), 241)
    prev = grid[0]
    if _second_difference(handle, prev) > 0:
        # still convex at x_star: only possible at the lower boundary
        return x_star, 0.0
    for x in grid[1:]:
        if _second_difference(handle, x) > 0:
            lo, hi = math.log(x), math.log(prev)
            while hi - lo > rel_tol:
                mid = 0.5 * (lo + hi)
                if _second_difference(handle, math.exp(mid)) > 0:
                    lo = mid
                else:
                    hi = mid
            return math.exp(0.5 * (lo + hi)), math.exp(hi) - math.exp(lo)
        prev = x
    return 0.0, float(grid[-1])
