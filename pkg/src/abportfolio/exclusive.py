"""Mutually exclusive treatments: test ``I0`` ideas on equal splits of ``N``
units, then ship at most one (the best posterior mean, if positive)."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import log_ndtr

from ._numerics import norm_pdf
from .exceptions import InfeasibleError

_ROWS = 4096
_CELLS = 1 << 20


@dataclass(frozen=True)
class ExclusiveResult:
    I0: int
    value: float
    stderr: float
    method: str
    valid: bool = True
    fluctuation: Optional[float] = None


def _shrinkage(prior, noise, N, I0):
    noise_var = noise.sigma ** 2 * I0 / N
    return prior.tau ** 2 / (prior.tau ** 2 + noise_var), math.sqrt(noise_var)


def exclusive_value_mc(prior, noise, N, I0, samples=100_000, seed=0):
    """Monte Carlo estimate of ``E[max_i E[delta_i | data]^+]``.

    Samples are generated in fixed row chunks, each with its own pair of
    child generators (effects, noise) drawn test-major, so runs that share a
    seed share the draws for their first ``min(I0, I0')`` tests: scans over
    ``I0`` use common random numbers.
    """
    if I0 > N:
        raise InfeasibleError(f"cannot test I0={I0} ideas with only N={N} units")
    if I0 < 1:
        raise ValueError("I0 must be >= 1")
    if samples < 1000:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    shrink, noise_sd = _shrinkage(prior, noise, N, I0)
    n_chunks = -(-samples // _ROWS)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    total = 0.0
    total_sq = 0.0
    for c, child in enumerate(children):
        rows = min(_ROWS, samples - c * _ROWS)
        g_eff, g_noise = (np.random.default_rng(s) for s in child.spawn(2))
        best = np.full(rows, -np.inf)
        per_block = max(1, _CELLS // rows)
        for start in range(0, I0, per_block):
            k = min(per_block, I0 - start)
            delta = prior.mu + prior.tau * g_eff.standard_normal((k, rows))
            delta_hat = delta + noise_sd * g_noise.standard_normal((k, rows))
            np.maximum(best, delta_hat.max(axis=0), out=best)
        value = np.maximum(prior.mu + shrink * (best - prior.mu), 0.0)
        total += math.fsum(value)
        total_sq += math.fsum(value * value)
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return ExclusiveResult(int(I0), mean, math.sqrt(var / samples), "monte_carlo")


def exclusive_value_quad(prior, noise, N, I0):
    """Exact value by 1-D quadrature.

    Observed effects are i.i.d. ``N(mu, v)`` with ``v = tau**2 + sigma**2 I0 / N``
    and the posterior mean is affine in them, so the best posterior mean is
    ``mu + (tau**2 / sqrt(v)) M`` with ``M`` the maximum of ``I0`` standard
    normals (density ``I0 phi(z) Phi(z)**(I0 - 1)``).
    """
    if I0 > N:
        raise InfeasibleError(f"cannot test I0={I0} ideas with only N={N} units")
    v = prior.tau ** 2 + noise.sigma ** 2 * I0 / N
    a = prior.tau ** 2 / math.sqrt(v)
    lo = max(-prior.mu / a, -40.0)

    def integrand(z):
        return (prior.mu + a * z) * I0 * norm_pdf(z) * math.exp((I0 - 1) * log_ndtr(z))

    centre = math.sqrt(2.0 * math.log(I0)) if I0 > 1 else 0.0
    pts = [p for p in (centre - 1.0, centre, centre + 1.0) if lo < p < 40.0]
    value, _ = integrate.quad(integrand, lo, 40.0, points=pts or None, epsabs=1e-14, epsrel=1e-11, limit=400)
    return ExclusiveResult(int(I0), value, 0.0, "quadrature")


def exclusive_value_approx(prior, noise, N, I0, form="plain"):
    """Extreme-value approximation of the best posterior mean.

    ``form="plain"`` returns ``mu + sqrt(2 log I0 / v)`` with fluctuation
    scale ``1 / sqrt(2 v log I0)``; ``form="scaled"`` multiplies both
    excess terms by ``tau**2``, which is what the shrinkage of the maximum
    observed effect gives directly. ``valid`` is False when the mean is
    below three fluctuation scales.
    """
    if I0 < 2:
        raise ValueError("I0 must be >= 2 for the extreme-value approximation")
    if I0 > N:
        raise InfeasibleError(f"cannot test I0={I0} ideas with only N={N} units")
    v = prior.tau ** 2 + noise.sigma ** 2 * I0 / N
    log_i = math.log(I0)
    scale = 1.0 if form == "plain" else prior.tau ** 2
    if form not in ("plain", "scaled"):
        raise ValueError(f"unknown form {form!r}")
    mean = prior.mu + scale * math.sqrt(2.0 * log_i / v)
    fluct = scale / math.sqrt(2.0 * v * log_i)
    return ExclusiveResult(int(I0), mean, 0.0, "approx", valid=mean >= 3.0 * fluct, fluctuation=fluct)


_METHODS = {
    "monte_carlo": lambda prior, noise, N, I0, samples, seed: exclusive_value_mc(prior, noise, N, I0, samples, seed),
    "quadrature": lambda prior, noise, N, I0, samples, seed: exclusive_value_quad(prior, noise, N, I0),
    "approx": lambda prior, noise, N, I0, samples, seed: exclusive_value_approx(prior, noise, N, I0),
    "approx_scaled": lambda prior, noise, N, I0, samples, seed: exclusive_value_approx(prior, noise, N, I0, "scaled"),
}


def optimize_I0(prior, noise, N, I, method="monte_carlo", samples=10_000, seed=0, grid_points=64):
    """Best number of ideas to test, scanning a log-spaced grid of ``I0`` and
    then every integer (or a finer sub-grid) between the neighbours of the
    best grid point. Monte Carlo evaluations reuse ``seed`` throughout.

    Returns ``(best_I0, curve)`` with ``curve`` sorted by ``I0``.
    """
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(_METHODS)}")
    lower = 2 if method.startswith("approx") else 1
    upper = min(I, N)
    if upper < lower:
        raise ValueError(f"no feasible I0 in [{lower}, {upper}]")
    evaluate = _METHODS[method]
    results = {}

    def run(points):
        for i0 in points:
            i0 = int(i0)
            if i0 not in results:
                results[i0] = evaluate(prior, noise, N, i0, samples, seed)

    grid = np.unique(np.round(np.geomspace(lower, upper, min(grid_points, upper - lower + 1))).astype(int))
    run(grid)
    best = max(sorted(results), key=lambda k: results[k].value)
    idx = int(np.searchsorted(grid, best))
    left = grid[idx - 1] if idx > 0 else best
    right = grid[idx + 1] if idx + 1 < grid.size else best
    inner = np.arange(left + 1, right)
    if inner.size > grid_points:
        inner = np.unique(np.round(np.geomspace(left + 1, right - 1, grid_points)).astype(int))
    run(inner)
    keys = sorted(results)
    best = max(keys, key=lambda k: results[k].value)
    return best, [results[k] for k in keys]
