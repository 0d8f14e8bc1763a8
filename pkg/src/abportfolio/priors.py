"""Treatment-effect priors, the Gaussian observation model and prior fitting.

Observed effects follow ``delta_hat ~ N(delta, sigma**2 / n)`` with
``delta`` drawn from a prior ``G``. Everything here is immutable and pure.
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from ._numerics import golden_section_max, norm_cdf, norm_pdf, norm_sf
from .exceptions import (
    BracketWidenedWarning,
    DegeneratePriorWarning,
    InsufficientDataError,
    NumericalFailure,
    PriorAssumptionWarning,
)

DEFAULT_QUAD_ORDER = 64


def _check_finite(name, value):
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class GaussianPrior:
    """Normal prior ``N(mu, tau**2)`` on treatment effects (metric units)."""

    mu: float
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "tau", float(self.tau))
        _check_finite("mu", self.mu)
        _check_finite("tau", self.tau)
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau!r}")
        if self.mu > 0:
            warnings.warn(
                f"prior mean mu={self.mu} > 0 violates the E[delta] <= 0 "
                "assumption; results remain valid",
                PriorAssumptionWarning,
                stacklevel=3,
            )

    @property
    def violates_nonpositive_mean(self):
        return self.mu > 0

    @property
    def mean(self):
        return self.mu

    @property
    def sd(self):
        return self.tau

    def sample(self, rng, size):
        return self.mu + self.tau * rng.standard_normal(size)


@dataclass(frozen=True)
class DiscretePrior:
    """Finitely supported prior given as ``(value, weight)`` atoms."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(v), float(w)) for v, w in self.atoms)
        if not atoms:
            raise ValueError("a discrete prior needs at least one atom")
        for v, w in atoms:
            _check_finite("atom value", v)
            if not (w > 0 and math.isfinite(w)):
                raise ValueError(f"atom weights must be > 0, got {w!r}")
        total = math.fsum(w for _, w in atoms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"atom weights must sum to 1, got {total!r}")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_arrays(cls, values, weights, normalize=False):
        weights = np.asarray(weights, dtype=float)
        if normalize:
            weights = weights / weights.sum()
        return cls(tuple(zip(np.asarray(values, dtype=float), weights)))

    @property
    def values(self):
        return np.array([v for v, _ in self.atoms])

    @property
    def weights(self):
        return np.array([w for _, w in self.atoms])

    @property
    def mean(self):
        return float(np.dot(self.values, self.weights))

    @property
    def sd(self):
        var = float(np.dot(self.weights, (self.values - self.mean) ** 2))
        return math.sqrt(max(var, 0.0))

    def sample(self, rng, size):
        idx = rng.choice(len(self.atoms), size=size, p=self.weights)
        return self.values[idx]


Prior = Union[GaussianPrior, DiscretePrior]


@dataclass(frozen=True)
class NoiseModel:
    """Unit-level noise scale: one unit's observation has s.d. ``sigma``."""

    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(self.sigma))
        _check_finite("sigma", self.sigma)
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma!r}")

    def se(self, n):
        """Standard error of the observed effect with ``n`` units."""
        return self.sigma / np.sqrt(n)


@dataclass(frozen=True)
class ExperimentRecord:
    delta_hat: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "delta_hat", float(self.delta_hat))
        _check_finite("delta_hat", self.delta_hat)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


# --- utilities ---------------------------------------------------------------


class Utility:
    """Increasing utility applied to a realized treatment effect."""

    def __call__(self, x):
        raise NotImplementedError

    @property
    def is_linear(self):
        return False


@dataclass(frozen=True)
class Linear(Utility):
    def __call__(self, x):
        return np.asarray(x, dtype=float) if np.ndim(x) else float(x)

    @property
    def is_linear(self):
        return True


@dataclass(frozen=True)
class LossAverse(Utility):
    """``u(x) = x + b * x * 1{x < 0}``: losses weigh ``1 + b`` times gains."""

    b: float

    def __post_init__(self):
        object.__setattr__(self, "b", float(self.b))
        if not (self.b >= 0 and math.isfinite(self.b)):
            raise ValueError(f"loss-aversion b must be finite and >= 0, got {self.b!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, (1.0 + self.b) * x, x)
        return out if out.ndim else float(out)

    @property
    def is_linear(self):
        return self.b == 0.0


@dataclass(frozen=True, eq=False)
class CustomUtility(Utility):
    """Wraps an increasing ``func``; checked on a 256-point grid at construction."""

    func: Callable
    lo: float = -8.0
    hi: float = 8.0

    def __post_init__(self):
        self.check_increasing(self.lo, self.hi)

    def check_increasing(self, lo, hi, points=256):
        grid = np.linspace(lo, hi, points)
        vals = np.asarray(self(grid), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("custom utility is not finite on its check grid")
        if np.any(np.diff(vals) < 0):
            bad = int(np.argmax(np.diff(vals) < 0))
            raise ValueError(
                f"custom utility decreases between {grid[bad]:.6g} and {grid[bad + 1]:.6g}"
            )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=float)
        if out.shape != x.shape:
            out = np.vectorize(self.func, otypes=[float])(x)
        return out if out.ndim else float(out)


def check_utility_for_prior(u, prior):
    """Re-check a custom utility over the prior mean +/- 8 prior s.d."""
    if isinstance(u, CustomUtility):
        sd = prior.sd if prior.sd > 0 else 1.0
        u.check_increasing(prior.mean - 8 * sd, prior.mean + 8 * sd)


# --- posterior computations ---------------------------------------------------


@lru_cache(maxsize=16)
def _hermgauss(order):
    x, w = np.polynomial.hermite.hermgauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def posterior_moments_gaussian(prior, noise, n, delta_hat):
    """Posterior mean and variance of the effect under a Gaussian prior.

    Parameters
    ----------
    prior : GaussianPrior
    noise : NoiseModel
    n : int or array_like
        Units allocated to the test, ``n >= 1``.
    delta_hat : float or array_like
        Observed effect.

    Returns
    -------
    m, s2 : float or ndarray
        ``m`` shrinks ``delta_hat`` toward ``mu`` with weight
        ``tau**2 / (tau**2 + sigma**2 / n)``; ``s2`` is the posterior variance.
    """
    if np.any(np.asarray(n) < 1):
        raise ValueError(f"n must be >= 1, got {n!r}")
    tau2 = prior.tau ** 2
    se2 = noise.sigma ** 2 / np.asarray(n, dtype=float)
    v = tau2 + se2
    m = np.asarray(delta_hat, dtype=float) * (tau2 / v) + prior.mu * (se2 / v)
    s2 = tau2 * se2 / v
    if np.ndim(m) == 0 and np.ndim(s2) == 0:
        return float(m), float(s2)
    return m, s2


def _normal_expected_utility(m, s, u, quad_order):
    """E[u(X)] for X ~ N(m, s**2); closed form for linear and loss-averse u."""
    if u.is_linear:
        return np.asarray(m, dtype=float)
    if isinstance(u, LossAverse):
        r = m / s
        # E[X 1{X<0}] = m Phi(-m/s) - s phi(m/s)
        return m * (1.0 + u.b * norm_sf(r)) - u.b * s * norm_pdf(r)
    x, w = _hermgauss(quad_order)
    m = np.asarray(m, dtype=float)
    s = np.asarray(s, dtype=float)
    pts = m[..., None] + math.sqrt(2.0) * s[..., None] * x
    return np.asarray(u(pts)) @ w / math.sqrt(math.pi)


def _discrete_posterior_weights(prior, noise, n, delta_hat):
    se = noise.sigma / math.sqrt(n)
    z = (np.asarray(delta_hat, dtype=float)[..., None] - prior.values) / se
    logw = np.log(prior.weights) - 0.5 * z * z
    return np.exp(logw - logsumexp(logw, axis=-1, keepdims=True))


def posterior_expected_utility(prior, noise, n, delta_hat, u=None, quad_order=DEFAULT_QUAD_ORDER):
    """Posterior expected utility ``E[u(delta) | delta_hat]`` with ``n`` units.

    Gaussian priors use the conjugate posterior (closed form for linear and
    loss-averse utilities, Gauss-Hermite otherwise); discrete priors sum
    over atoms with normal likelihood weights. Vectorized over ``delta_hat``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    u = Linear() if u is None else u
    if isinstance(prior, GaussianPrior):
        m, s2 = posterior_moments_gaussian(prior, noise, n, delta_hat)
        out = _normal_expected_utility(m, np.sqrt(s2), u, quad_order)
    else:
        post = _discrete_posterior_weights(prior, noise, n, delta_hat)
        out = post @ np.asarray(u(prior.values), dtype=float)
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        raise NumericalFailure(
            f"non-finite posterior expected utility for prior={prior!r}, "
            f"sigma={noise.sigma}, n={n}, delta_hat={delta_hat!r}, u={u!r}"
        )
    return out if out.ndim else float(out)


def prior_expected_utility(prior, u=None, quad_order=DEFAULT_QUAD_ORDER):
    """``E_G[u(delta)]``: the value of shipping without looking at data."""
    u = Linear() if u is None else u
    if isinstance(prior, GaussianPrior):
        return float(_normal_expected_utility(prior.mu, prior.tau, u, quad_order))
    return float(np.dot(prior.weights, np.asarray(u(prior.values), dtype=float)))


def expected_positive_part(prior):
    """``E_G[max(delta, 0)]``, the full-information value per idea."""
    if isinstance(prior, GaussianPrior):
        r = prior.mu / prior.tau
        return prior.tau * norm_pdf(r) + prior.mu * norm_cdf(r)
    return float(np.dot(prior.weights, np.maximum(prior.values, 0.0)))


def marginal_moments(prior, noise, n):
    """Mean and s.d. of the observed effect ``delta_hat`` with ``n`` units."""
    return prior.mean, math.sqrt(prior.sd ** 2 + noise.sigma ** 2 / n)


# --- prior fitting ------------------------------------------------------------


@dataclass(frozen=True)
class PriorFit:
    """Result of a Gaussian maximum-likelihood prior fit.

    Standard errors come from the expected Fisher information at the
    estimate. ``degenerate`` marks the boundary solution ``tau2 == 0``, in
    which case no proper :class:`GaussianPrior` exists.
    """

    mu: float
    tau2: float
    se_mu: float
    se_tau2: float
    loglik: float
    n_records: int
    degenerate: bool
    tau2_tolerance: float
    bracket_hi: float = field(repr=False)

    @property
    def tau(self):
        return math.sqrt(self.tau2)

    @property
    def se_tau(self):
        return self.se_tau2 / (2.0 * self.tau) if self.tau2 > 0 else math.inf

    @property
    def prior(self):
        if self.degenerate:
            raise ValueError("degenerate fit (tau2 = 0) has no proper Gaussian prior")
        return GaussianPrior(self.mu, self.tau)


def _record_arrays(records):
    if isinstance(records, np.ndarray):
        arr = np.asarray(records, dtype=float)
        d, n = arr[:, 0], arr[:, 1]
    else:
        d = np.array([r.delta_hat for r in records], dtype=float)
        n = np.array([r.n for r in records], dtype=float)
    # canonical order makes every floating-point sum independent of input order
    order = np.lexsort((d, n))
    return d[order], n[order]


def _profile(tau2, d, se2):
    w = 1.0 / (tau2 + se2)
    mu = math.fsum(w * d) / math.fsum(w)
    ll = -0.5 * math.fsum(np.log(tau2 + se2) + w * (d - mu) ** 2 + math.log(2 * math.pi))
    return mu, ll


def fit_gaussian_mle(records, noise, rel_tol=1e-8, max_widen=6):
    """Fit ``N(mu, tau**2)`` to heteroskedastic past experiments by MLE.

    ``mu`` is profiled out as the precision-weighted mean for each ``tau**2``
    and the profile likelihood is maximized over ``tau**2`` by golden-section
    search on ``[0, var(delta_hat)]``. If the upper end wins, the bracket is
    widened tenfold (with a warning).
    """
    d, n = _record_arrays(records)
    if d.size < 2:
        raise InsufficientDataError(f"need at least 2 records to fit a prior, got {d.size}")
    se2 = noise.sigma ** 2 / n
    hi = float(np.var(d))
    for _ in range(max_widen + 1):
        if hi <= 0.0:
            tau2, width = 0.0, 0.0
            break
        tol = rel_tol * hi
        tau2, _, width = golden_section_max(lambda t: _profile(t, d, se2)[1], 0.0, hi, tol=tol)
        if tau2 < hi:
            break
        warnings.warn(
            f"tau^2 estimate hit the upper bracket {hi:.6g}; widening x10",
            BracketWidenedWarning,
            stacklevel=2,
        )
        hi *= 10.0
    mu, ll = _profile(tau2, d, se2)
    degenerate = tau2 == 0.0
    if degenerate:
        warnings.warn(
            "maximum-likelihood tau^2 is 0 (no dispersion beyond noise)",
            DegeneratePriorWarning,
            stacklevel=2,
        )
    w = 1.0 / (tau2 + se2)
    return PriorFit(
        mu=mu,
        tau2=tau2,
        se_mu=1.0 / math.sqrt(math.fsum(w)),
        se_tau2=1.0 / math.sqrt(0.5 * math.fsum(w * w)),
        loglik=ll,
        n_records=int(d.size),
        degenerate=degenerate,
        tau2_tolerance=width,
        bracket_hi=hi,
    )


def mle_variance_equal_allocation(I0, N, noise, tau):
    """Sampling variances of the MLE of ``(mu, tau**2)`` when ``N`` units are
    split equally across ``I0`` past tests."""
    if I0 < 2:
        raise ValueError(f"I0 must be >= 2, got {I0!r}")
    v = tau ** 2 + noise.sigma ** 2 * I0 / N
    return v / I0, v * v / (I0 - 1)


# --- record ingestion ---------------------------------------------------------


def _parse_n(raw):
    x = float(raw)
    if not x.is_integer():
        raise ValueError(f"allocation size n must be an integer, got {raw!r}")
    return int(x)


def read_records_csv(path):
    """Read ``delta_hat,n`` rows. Numbers use a dot decimal separator."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["delta_hat", "n"]:
            raise ValueError(f"{path}: expected header 'delta_hat,n', got {reader.fieldnames!r}")
        return [
            ExperimentRecord(float(row["delta_hat"]), _parse_n(row["n"]))
            for row in reader
        ]


def records_from_objects(objs: Sequence[dict]):
    out = []
    for i, obj in enumerate(objs):
        if set(obj) != {"delta_hat", "n"}:
            raise ValueError(f"record {i}: expected keys delta_hat and n, got {sorted(obj)}")
        out.append(ExperimentRecord(float(obj["delta_hat"]), _parse_n(obj["n"])))
    return out


def read_records_json(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of records")
    return records_from_objects(data)
