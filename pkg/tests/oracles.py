"""Independent reference computations used by the tests.

Nothing here calls the package's closed forms: posteriors come from
importance-weighted prior draws, allocations from exhaustive enumeration,
maxima from dense grids.
"""

import itertools
import math

import numpy as np
from scipy import integrate, stats


def posterior_mc(prior_sampler, likelihood_sd, delta_hat, u, draws, seed):
    """Self-normalized importance estimate of ``E[u(delta) | delta_hat]``
    using prior draws weighted by the normal likelihood. Returns
    ``(estimate, stderr)`` with a delta-method standard error."""
    rng = np.random.default_rng(seed)
    delta = prior_sampler(rng, draws)
    w = np.exp(-0.5 * ((delta_hat - delta) / likelihood_sd) ** 2)
    g = u(delta)
    est = np.sum(w * g) / np.sum(w)
    resid = w * (g - est)
    se = math.sqrt(np.sum(resid ** 2)) / np.sum(w)
    return est, se


def left_sum(values):
    total = 0.0
    for v in values:
        total = total + v
    return total


def best_composition(f, parts, total, cap=None):
    """Max over ordered tuples of ``parts`` non-negative integers summing to
    ``total`` (each <= ``cap``) of ``f[n_1] + ... + f[n_parts]`` added left
    to right. Returns ``(value, argmax tuple)``."""
    cap = total if cap is None else cap
    best, arg = -math.inf, None
    for combo in itertools.product(range(min(cap, total) + 1), repeat=parts):
        if sum(combo) != total:
            continue
        v = left_sum(f[c] for c in combo)
        if v > best:
            best, arg = v, combo
    return best, arg


def grid_argmax(func, lo, hi, step):
    x = np.arange(lo, hi + step / 2, step)
    y = func(x)
    k = int(np.argmax(y))
    return x[k], y[k]


def gaussian_positive_part(mu, tau):
    """``E[(mu + tau Z)^+]`` by direct quadrature of the tail."""
    val, _ = integrate.quad(lambda x: x * stats.norm.pdf(x, mu, tau), 0.0, mu + 40 * tau, epsabs=1e-14)
    return val


def max_positive_part(mu, a, k):
    """``E[(mu + a M_k)^+]`` with ``M_k`` the max of ``k`` standard normals,
    via ``E[X^+] = int_0^inf P(X > x) dx`` (the survival-function route)."""
    def surv(x):
        return 1.0 - stats.norm.cdf((x - mu) / a) ** k
    upper = max(mu, 0.0) + a * 12.0
    val, _ = integrate.quad(surv, 0.0, upper, epsabs=1e-13, epsrel=1e-11, limit=400)
    return val
