"""Shared numerical primitives: normal distribution helpers and 1-D searches."""

import math

import numpy as np
from scipy.special import ndtr, ndtri

SQRT_2PI = math.sqrt(2.0 * math.pi)
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / SQRT_2PI
    return out if out.ndim else float(out)


def norm_cdf(x):
    # Cephes ndtr: erf/erfc based, |error| ~ 1e-16, deterministic across builds
    out = ndtr(np.asarray(x, dtype=float))
    return out if np.ndim(out) else float(out)


def norm_sf(x):
    """Upper tail 1 - Phi(x), evaluated without cancellation."""
    out = ndtr(-np.asarray(x, dtype=float))
    return out if np.ndim(out) else float(out)


def norm_ppf(p):
    out = ndtri(np.asarray(p, dtype=float))
    return out if np.ndim(out) else float(out)


def golden_section_max(func, lo, hi, tol=1e-8, max_iter=500):
    """Maximize a unimodal ``func`` on ``[lo, hi]``.

    Stops once the bracket is narrower than ``tol`` (absolute). Returns
    ``(x, fx, width)`` where ``width`` is the final bracket width. The
    endpoints are compared against the interior estimate so boundary
    maxima are returned exactly.
    """
    a, b = float(lo), float(hi)
    f_lo, f_hi = func(a), func(b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    it = 0
    while (b - a) > tol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = func(d)
        it += 1
    x, fx = (c, fc) if fc >= fd else (d, fd)
    if f_lo >= fx and f_lo >= f_hi:
        return float(lo), f_lo, b - a
    if f_hi > fx:
        return float(hi), f_hi, b - a
    return x, fx, b - a


def bisect_increasing(func, lo, hi, xtol, max_iter=400):
    """Root of a non-decreasing ``func`` with ``func(lo) < 0 <= func(hi)``.

    Plain bisection: the result is the right end of the final bracket, so
    ``func(result) >= 0`` holds exactly.
    """
    a, b = float(lo), float(hi)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if func(mid) >= 0.0:
            b = mid
        else:
            a = mid
    return b
