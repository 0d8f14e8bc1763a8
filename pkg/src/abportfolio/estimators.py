"""scikit-learn style wrappers around the functional core.

Rows of ``X`` are past or current experiments, ``[delta_hat, n]``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .allocation import AllocationProblem, solve_dp
from .decisions import optimal_threshold_generic
from .priors import (
    ExperimentRecord,
    LossAverse,
    Linear,
    NoiseModel,
    fit_gaussian_mle,
    posterior_moments_gaussian,
)
from .production import CostModel, ProductionHandle


def _records(X):
    X = check_array(X, dtype=float)
    if X.shape[1] != 2:
        raise ValueError(f"X must have two columns [delta_hat, n], got {X.shape[1]}")
    if np.any(X[:, 1] < 1) or np.any(X[:, 1] != np.round(X[:, 1])):
        raise ValueError("sample sizes in column 1 must be integers >= 1")
    return X


class GaussianPriorEstimator(TransformerMixin, BaseEstimator):
    """Fits the Gaussian prior of true effects by marginal maximum likelihood;
    ``transform`` returns posterior ``[mean, sd]`` per row."""

    def __init__(self, sigma=1.0):
        self.sigma = sigma

    def fit(self, X, y=None):
        X = _records(X)
        noise = NoiseModel(self.sigma)
        fit = fit_gaussian_mle([ExperimentRecord(d, int(n)) for d, n in X], noise)
        self.fit_ = fit
        self.mu_ = fit.mu
        self.tau_ = fit.tau
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "fit_")
        X = _records(X)
        m, s2 = posterior_moments_gaussian(self.fit_.prior, NoiseModel(self.sigma), X[:, 1], X[:, 0])
        return np.column_stack([m, np.sqrt(s2)])

    def score(self, X, y=None):
        """Mean marginal log-likelihood per record."""
        check_is_fitted(self, "fit_")
        X = _records(X)
        v = self.tau_ ** 2 + self.sigma ** 2 / X[:, 1]
        ll = -0.5 * (np.log(2 * np.pi * v) + (X[:, 0] - self.mu_) ** 2 / v)
        return float(np.mean(ll))


class ShipDecisionRule(BaseEstimator):
    """Bayes-optimal ship decision with a prior fitted from history.

    ``b`` is the loss-aversion coefficient (0 for linear utility) and
    ``cost`` the per-launch implementation cost.
    """

    def __init__(self, sigma=1.0, b=0.0, cost=0.0):
        self.sigma = sigma
        self.b = b
        self.cost = cost

    def fit(self, X, y=None):
        self.prior_estimator_ = GaussianPriorEstimator(self.sigma).fit(X)
        self.prior_ = self.prior_estimator_.fit_.prior
        self.n_features_in_ = 2
        return self

    def _utility(self):
        return LossAverse(self.b) if self.b else Linear()

    def threshold(self, n):
        check_is_fitted(self, "prior_")
        return optimal_threshold_generic(self.prior_, NoiseModel(self.sigma), n, self._utility(), self.cost)

    def decision_function(self, X):
        """Observed effect minus the optimal cutoff at that row's ``n``."""
        X = _records(X)
        cut = {n: self.threshold(n).cutoff_delta_hat for n in np.unique(X[:, 1])}
        return X[:, 0] - np.array([cut[n] for n in X[:, 1]])

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(int)


class AllocationPlanner(BaseEstimator):
    """Optimal split of ``N`` units across ``I`` ideas under a prior fitted
    from history. ``predict`` ignores its input rows and returns the plan."""

    def __init__(self, sigma=1.0, I=1, N=1, c0=1, implementation_cost=0.0):
        self.sigma = sigma
        self.I = I
        self.N = N
        self.c0 = c0
        self.implementation_cost = implementation_cost

    def fit(self, X, y=None):
        prior = GaussianPriorEstimator(self.sigma).fit(X).fit_.prior
        handle = ProductionHandle(prior, NoiseModel(self.sigma), cost=CostModel(self.implementation_cost))
        self.prior_ = prior
        self.solution_ = solve_dp(AllocationProblem(self.I, self.N, self.c0, handle))
        self.n_features_in_ = 2
        return self

    def predict(self, X=None):
        check_is_fitted(self, "solution_")
        return np.asarray(self.solution_.allocation, dtype=int)
