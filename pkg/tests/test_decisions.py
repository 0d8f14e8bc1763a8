import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import grid_argmax
from scipy import stats

from abportfolio import (
    CustomUtility,
    DecisionThreshold,
    DiscretePrior,
    GaussianPrior,
    InfiniteRiskError,
    Linear,
    LossAverse,
    NoiseModel,
    implied_b_for_alpha,
    implied_cost_for_alpha,
    loss_averse_cutoff_gaussian,
    minimax_constant,
    minimax_risk,
    minimax_rule,
    optimal_threshold_gaussian_linear,
    optimal_threshold_generic,
    pass_probability,
    posterior_expected_utility,
)
from abportfolio.decisions import ship_probability

# --- thresholds ---------------------------------------------------------------------


def test_zero_mean_gives_half():
    for n in (1, 10, 10**5):
        th = optimal_threshold_gaussian_linear(GaussianPrior(0.0, 2.0), NoiseModel(3.0), n)
        assert th.cutoff_delta_hat == 0.0 and th.one_sided_alpha == 0.5


def test_hand_example():
    th = optimal_threshold_gaussian_linear(GaussianPrior(-1.0, 1.0), NoiseModel(1.0), 1)
    assert th.cutoff_delta_hat == 1.0 and th.t_statistic == 1.0
    assert abs(th.one_sided_alpha - stats.norm.sf(1.0)) <= 1e-15
    gen = optimal_threshold_generic(GaussianPrior(-1.0, 1.0), NoiseModel(1.0), 1)
    assert abs(gen.cutoff_delta_hat - 1.0) <= 1e-8


def test_alpha_rises_toward_half():
    alphas = [
        optimal_threshold_gaussian_linear(GaussianPrior(-0.3, 1.0), NoiseModel(2.0), n).one_sided_alpha
        for n in np.geomspace(1, 1e8, 30)
    ]
    assert np.all(np.diff(alphas) > 0) and alphas[-1] < 0.5 and alphas[-1] > 0.49


@settings(max_examples=100, deadline=None)
@given(mu=st.floats(-2, 0), tau=st.floats(0.1, 3), sigma=st.floats(0.3, 20), n=st.integers(1, 10**6))
def test_generic_matches_closed_threshold(mu, tau, sigma, n):
    prior, noise = GaussianPrior(mu, tau), NoiseModel(sigma)
    closed = optimal_threshold_gaussian_linear(prior, noise, n)
    gen = optimal_threshold_generic(prior, noise, n)
    if gen.saturation is not None:
        # cutoff beyond the 12 marginal s.d. bracket: boundary result by contract
        sd = math.sqrt(tau ** 2 + sigma ** 2 / n)
        assert gen.saturation == "never" and closed.cutoff_delta_hat - mu > 12 * sd
        return
    assert abs(gen.cutoff_delta_hat - closed.cutoff_delta_hat) <= 1e-8 * (1 + abs(closed.cutoff_delta_hat))


def test_symmetric_discrete_prior():
    prior = DiscretePrior(((-1.0, 0.5), (1.0, 0.5)))
    for n in (1, 7, 400):
        th = optimal_threshold_generic(prior, NoiseModel(2.0), n)
        assert abs(th.cutoff_delta_hat) <= 1e-9 and abs(th.one_sided_alpha - 0.5) <= 1e-9


def test_threshold_is_the_sign_change():
    prior, noise = DiscretePrior(((-2.0, 0.6), (0.5, 0.3), (3.0, 0.1))), NoiseModel(4.0)
    u = CustomUtility(lambda x: np.tanh(x) + 0.05 * x)
    th = optimal_threshold_generic(prior, noise, 25, u)
    c = th.cutoff_delta_hat
    assert posterior_expected_utility(prior, noise, 25, c - 1e-6, u) < 0
    assert posterior_expected_utility(prior, noise, 25, c + 1e-6, u) > 0


def test_threshold_saturation():
    never = optimal_threshold_generic(GaussianPrior(-0.1, 0.1), NoiseModel(1.0), 10, s=5.0)
    assert never.saturation == "never" and never.one_sided_alpha == 0.0
    assert not never.ships_by_p_value(1e6) and not never.ships(1e6)
    always = optimal_threshold_generic(DiscretePrior(((1.0, 0.5), (2.0, 0.5))), NoiseModel(1.0), 10)
    assert always.saturation == "always" and always.ships_by_p_value(-1e6)


def test_p_value_decision_is_the_cutoff_decision():
    th = optimal_threshold_gaussian_linear(GaussianPrior(-0.5, 1.0), NoiseModel(2.0), 9)
    for x in np.linspace(-3, 3, 61):
        if abs(x - th.cutoff_delta_hat) > 1e-9:
            assert th.ships_by_p_value(x) == bool(th.ships(x)) == bool(th.p_value(x) <= th.one_sided_alpha)


def test_p_value_decision_far_in_the_tails():
    # t-statistic of 45: the level underflows to 0 in linear space
    th = DecisionThreshold.from_cutoff(45.0, 1, 1.0)
    assert th.ships_by_p_value(45.5) and not th.ships_by_p_value(44.5)
    th = DecisionThreshold.from_cutoff(-45.0, 1, 1.0)
    assert th.ships_by_p_value(-44.5) and not th.ships_by_p_value(-45.5)


def test_from_alpha_round_trip():
    th = DecisionThreshold.from_alpha(0.05, 100, 2.0)
    assert abs(th.t_statistic - stats.norm.isf(0.05)) <= 1e-12
    assert abs(DecisionThreshold.from_cutoff(th.cutoff_delta_hat, 100, 2.0).one_sided_alpha - 0.05) <= 1e-15
    with pytest.raises(ValueError):
        DecisionThreshold.from_alpha(1.5, 1, 1.0)


def test_threshold_validation():
    with pytest.raises(ValueError):
        optimal_threshold_gaussian_linear(GaussianPrior(0.0, 1.0), NoiseModel(1.0), 0)
    with pytest.raises(ValueError):
        optimal_threshold_generic(GaussianPrior(0.0, 1.0), NoiseModel(1.0), 0)


# --- loss aversion -------------------------------------------------------------------


@pytest.mark.parametrize("b", [0.0, 0.5, 2.0, 10.0, 60.0])
def test_loss_averse_closed_route_vs_generic(b):
    prior, noise = GaussianPrior(-0.2, 0.8), NoiseModel(3.0)
    for n in (1, 50, 5000):
        closed = loss_averse_cutoff_gaussian(prior, noise, n, b)
        gen = optimal_threshold_generic(prior, noise, n, LossAverse(b))
        assert abs(closed - gen.cutoff_delta_hat) <= 1e-8 * (1 + abs(closed))


def test_loss_aversion_is_stricter():
    prior, noise = GaussianPrior(-0.2, 0.8), NoiseModel(3.0)
    cutoffs = [loss_averse_cutoff_gaussian(prior, noise, 100, b) for b in (0, 1, 5, 25)]
    assert np.all(np.diff(cutoffs) > 0)
    assert cutoffs[0] == optimal_threshold_gaussian_linear(prior, noise, 100).cutoff_delta_hat


# --- pass and ship probability --------------------------------------------------------------


def test_pass_probability_examples():
    noise = NoiseModel(1.0)
    assert pass_probability(GaussianPrior(0.0, 1.0), noise, 5) == 0.5
    assert abs(pass_probability(GaussianPrior(-1.0, 1.0), noise, 1) - stats.norm.cdf(-math.sqrt(2))) <= 1e-15
    assert abs(pass_probability(GaussianPrior(-1.0, 1.0), noise, 1e12) - stats.norm.cdf(-1.0)) <= 1e-6
    with pytest.raises(ValueError):
        pass_probability(GaussianPrior(-1.0, 1.0), noise, 0)


def test_pass_probability_monte_carlo():
    rng = np.random.default_rng(6)
    k = 10**6
    delta = rng.normal(-1.0, 1.0, k)
    delta_hat = delta + rng.standard_normal(k)
    hits = delta_hat >= 1.0
    p = pass_probability(GaussianPrior(-1.0, 1.0), NoiseModel(1.0), 1)
    assert abs(hits.mean() - p) <= 3 * math.sqrt(p * (1 - p) / k)


def test_ship_probability():
    prior, noise = GaussianPrior(-0.4, 0.9), NoiseModel(2.0)
    th = optimal_threshold_gaussian_linear(prior, noise, 30)
    assert abs(ship_probability(prior, noise, 30, th.cutoff_delta_hat) - pass_probability(prior, noise, 30)) <= 1e-14
    assert ship_probability(prior, noise, 30, math.inf) == 0.0
    assert ship_probability(prior, noise, 30, -math.inf) == 1.0
    disc = DiscretePrior(((-1.0, 0.25), (1.0, 0.75)))
    expected = 0.25 * stats.norm.sf(1.5 / 0.5) + 0.75 * stats.norm.sf(-0.5 / 0.5)
    assert abs(ship_probability(disc, NoiseModel(1.0), 4, 0.5) - expected) <= 1e-15


# --- inversions -------------------------------------------------------------------------------


def test_implied_cost_examples():
    prior, noise, n = GaussianPrior(-0.3, 1.0), NoiseModel(2.0), 40
    alpha0 = optimal_threshold_gaussian_linear(prior, noise, n).one_sided_alpha
    assert abs(implied_cost_for_alpha(prior, noise, n, alpha0)) <= 1e-12
    grid = [0.4, 0.2, 0.1, 0.05, 0.01]
    costs = [implied_cost_for_alpha(prior, noise, n, a) for a in grid]
    assert np.all(np.diff(costs) > 0)
    with pytest.raises(ValueError):
        implied_cost_for_alpha(prior, noise, n, 0.0)


@settings(max_examples=60, deadline=None)
@given(
    mu=st.floats(-1, 0),
    tau=st.floats(0.2, 2),
    sigma=st.floats(0.5, 10),
    n=st.integers(1, 10**4),
    alpha=st.floats(0.005, 0.45),
)
def test_implied_cost_round_trip(mu, tau, sigma, n, alpha):
    prior, noise = GaussianPrior(mu, tau), NoiseModel(sigma)
    s = implied_cost_for_alpha(prior, noise, n, alpha)
    th = optimal_threshold_generic(prior, noise, n, Linear(), s)
    assert th.saturation is None
    assert abs(th.one_sided_alpha - alpha) <= 1e-9


def test_implied_b_examples():
    prior, noise, n = GaussianPrior(-0.1, 0.5), NoiseModel(2.0), 100
    alpha0 = optimal_threshold_gaussian_linear(prior, noise, n).one_sided_alpha
    assert implied_b_for_alpha(prior, noise, n, alpha0) == 0.0
    bs = []
    for a in (0.3, 0.2, 0.1, 0.05, 0.01):
        b = implied_b_for_alpha(prior, noise, n, a)
        th = optimal_threshold_generic(prior, noise, n, LossAverse(b))
        assert abs(th.one_sided_alpha - a) <= 1e-6
        bs.append(b)
    assert np.all(np.diff(bs) > 0)
    with pytest.raises(ValueError, match="not attainable"):
        implied_b_for_alpha(prior, noise, n, min(alpha0 + 0.05, 0.99))
    with pytest.raises(ValueError, match="not attainable"):
        implied_b_for_alpha(prior, noise, n, 1e-300, b_cap=10.0)


# --- minimax ----------------------------------------------------------------------------------


def test_minimax_rule():
    assert minimax_rule(0.0) is True
    assert minimax_rule(-1e-12) is False
    assert minimax_rule(3.5) is True
    assert minimax_rule(np.array([-1.0, 0.0])).tolist() == [False, True]


def test_minimax_constant_grid():
    c, nu = minimax_constant()
    nu_grid, c_grid = grid_argmax(lambda v: v * stats.norm.sf(v), 1e-5, 5.0, 1e-5)
    assert abs(c - c_grid) <= 1e-9 and abs(nu - nu_grid) <= 1e-4


def test_minimax_risk_worst_case_oracle():
    # worst case over a single effect size of the regret of shipping iff delta_hat >= 0
    sigma, n = 2.0, 9
    se = sigma / math.sqrt(n)
    effects = np.linspace(1e-6, 10 * se, 200_001)
    worst = np.max(effects * stats.norm.sf(effects / se))
    assert abs(minimax_risk([n], NoiseModel(sigma)) - worst) <= 1e-9


def test_minimax_risk_scaling_and_equal_split():
    noise = NoiseModel(1.0)
    assert abs(minimax_risk([4], noise) - minimax_risk([1], noise) / 2) <= 1e-15
    equal = minimax_risk([3, 3, 3], noise)
    for combo in itertools.product(range(1, 8), repeat=3):
        if sum(combo) == 9 and combo != (3, 3, 3):
            assert minimax_risk(combo, noise) > equal
    with pytest.raises(InfiniteRiskError):
        minimax_risk([3, 0], noise)
