import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import left_sum

from abportfolio import (
    AllocationProblem,
    GaussianPrior,
    NumericalFailure,
    ProgramSpec,
    metaproduction_direct,
    solve_dp,
    solve_sequential,
    solve_shared_allocation,
)
from abportfolio import portfolio
from abportfolio.portfolio import ProgramError, idea_value_curve, program_frontier, solve_shared_ideas


def _program(name, mu=-0.3, tau=1.0, sigma=4.0, **kw):
    return ProgramSpec(name, GaussianPrior(mu, tau), sigma, **kw)


# --- shared pool ---------------------------------------------------------------------


def test_single_program_gets_the_pool():
    p = _program("a", I=4)
    sol = solve_shared_allocation([p], 60)
    assert sol.units == (60,)
    assert sol.value == solve_dp(AllocationProblem(4, 60, 1, p.handle)).value


def test_two_identical_programs_scan():
    a, b = _program("a", I=3), _program("b", I=3)
    N = 40
    fa = program_frontier(a, N, 1)
    scan = max(fa[k] + fa[N - k] for k in range(N + 1))
    sol = solve_shared_allocation([a, b], N)
    assert sol.value == scan
    assert fa[N // 2] * 2 <= scan


def test_allocation_reevaluates_to_value():
    progs = [_program("a", I=3, weight=2.0), _program("b", -1.0, 1.0, 10.0, I=5), _program("c", -0.1, 0.3, 2.0, I=2)]
    sol = solve_shared_allocation(progs, 90, block=3)
    assert sum(sol.units) == 90
    total = 0.0
    for p, alloc in zip(progs, sol.allocations):
        assert len(alloc) == p.I
        total += p.weight * math.fsum(p.handle(float(n)) for n in alloc)
    assert abs(total - sol.value) <= 1e-9


def test_random_splits_never_beat_optimum():
    progs = [_program("a", I=3), _program("b", -0.8, 1.0, 6.0, I=4), _program("c", -0.05, 0.5, 3.0, I=2)]
    N = 48
    sol = solve_shared_allocation(progs, N)
    frontiers = [program_frontier(p, N, 1) for p in progs]
    rng = np.random.default_rng(2)
    for _ in range(300):
        cut = np.sort(rng.integers(0, N + 1, 2))
        split = (cut[0], cut[1] - cut[0], N - cut[1])
        assert left_sum(fr[k] for fr, k in zip(frontiers, split)) <= sol.value + 1e-12


def test_empty_program_changes_nothing():
    progs = [_program("a", I=3), _program("b", -0.8, 1.0, 6.0, I=4)]
    base = solve_shared_allocation(progs, 50)
    more = solve_shared_allocation(progs + [_program("none", I=0)], 50)
    assert more.value == base.value and more.units[:2] == base.units


def test_weights_scale_value():
    progs = [_program("a", I=3, weight=1.0), _program("b", -0.8, 1.0, 6.0, I=4, weight=0.5)]
    scaled = [ProgramSpec(p.name, p.prior, p.sigma, p.I, p.N, 3 * p.weight) for p in progs]
    a, b = solve_shared_allocation(progs, 50), solve_shared_allocation(scaled, 50)
    assert abs(b.value - 3 * a.value) <= 1e-12 * abs(b.value)
    frontiers = [program_frontier(p, 50, 1) for p in scaled]
    assert abs(sum(p.weight * fr[k] for p, fr, k in zip(scaled, frontiers, b.units)) - b.value) <= 1e-12


def test_value_non_decreasing_in_pool():
    progs = [_program("a", I=2), _program("b", -0.8, 1.0, 6.0, I=3)]
    vals = [solve_shared_allocation(progs, N).value for N in range(1, 40)]
    assert np.all(np.diff(vals) >= -1e-15)


def test_program_validation():
    with pytest.raises(ValueError):
        _program("bad", weight=0.0)
    with pytest.raises(ValueError):
        _program("bad", I=-1)


def test_inner_failure_names_program(monkeypatch):
    def broken(*args, **kwargs):
        raise NumericalFailure("non-finite production value")

    monkeypatch.setattr(portfolio, "dp_frontier", broken)
    with pytest.raises(ProgramError, match="'search'") as info:
        solve_shared_allocation([_program("search", I=3)], 20)
    assert isinstance(info.value.__cause__, NumericalFailure)


# --- shared ideas ---------------------------------------------------------------------


def test_shared_ideas_trivial_cases():
    progs = [_program("a", N=100), _program("b", -0.8, 1.0, 6.0, N=300)]
    zero = solve_shared_ideas(progs, 0)
    assert zero.value == 0.0 and zero.ideas == (0, 0)
    single = solve_shared_ideas([progs[0]], 7)
    assert single.ideas == (7,)
    assert single.value == metaproduction_direct(7, 100, progs[0].handle)[0]


def test_shared_ideas_enumeration():
    progs = [
        _program("a", -0.3, 1.0, 4.0, N=200, weight=1.0),
        _program("b", -1.0, 1.0, 10.0, N=5000, weight=0.7),
        _program("c", -0.05, 0.4, 2.0, N=60, weight=2.0),
    ]
    for I in range(0, 11):
        sol = solve_shared_ideas(progs, I)
        best = -math.inf
        for split in itertools.product(range(I + 1), repeat=3):
            if sum(split) > I:
                continue
            v = left_sum(p.weight * (metaproduction_direct(k, p.N, p.handle)[0] if k else 0.0) for p, k in zip(progs, split))
            best = max(best, v)
        assert sol.value == pytest.approx(best, rel=1e-14, abs=1e-300)
        assert sum(sol.ideas) <= I


def test_idea_curve_non_decreasing():
    curve = idea_value_curve(_program("a", -1.0, 1.0, 10.0, N=500), 40)
    assert curve[0] == 0.0 and np.all(np.diff(curve) >= 0)


# --- sequential ----------------------------------------------------------------------------


def _brute_schedules(curve, weights, I):
    T = len(weights)
    best, best_set = -math.inf, []
    for combo in itertools.product(range(I + 1), repeat=T):
        if sum(combo) > I:
            continue
        v = left_sum(w * curve[j] for w, j in zip(weights, combo))
        if v > best:
            best, best_set = v, [combo]
        elif v == best:
            best_set.append(combo)
    return best, best_set


def test_sequential_single_period():
    p = _program("a", -0.5, 1.0, 10.0)
    sched = solve_sequential(p, 800, 25, 1)
    value, i_star = metaproduction_direct(25, 800, p.handle)
    assert sched.value == value and sched.ideas_per_period == (i_star,) and sched.T == 1


def test_sequential_equal_weights_balanced():
    # large pool per idea: the idea curve is strictly concave
    p = _program("a", -0.2, 1.0, 1.0)
    N = 10**4
    for I in range(1, 13):
        curve = idea_value_curve(ProgramSpec("a", p.prior, p.sigma, I, N), I)
        assert np.all(np.diff(curve, 2) < 0)
        for T in range(1, 5):
            sched = solve_sequential(p, N, I, T)
            best, _ = _brute_schedules(curve, [1.0] * T, I)
            assert sched.value == pytest.approx(best, rel=1e-14)
            assert max(sched.ideas_per_period) - min(sched.ideas_per_period) <= 1


def test_sequential_remaining_weights_front_load():
    p = _program("a", -0.5, 1.0, 10.0)
    for N, I, T in ((500, 12, 4), (5000, 10, 3), (100, 8, 4)):
        weights = [T - t for t in range(1, T + 1)]
        sched = solve_sequential(p, N, I, T, weights)
        curve = idea_value_curve(ProgramSpec("a", p.prior, p.sigma, I, N), I)
        best, _ = _brute_schedules(curve, weights, I)
        assert sched.value == pytest.approx(best, rel=1e-14)
        assert all(a >= b for a, b in zip(sched.ideas_per_period, sched.ideas_per_period[1:]))


def test_sequential_validation():
    p = _program("a")
    with pytest.raises(ValueError):
        solve_sequential(p, 100, 5, 2, [1.0, -1.0])
    with pytest.raises(ValueError):
        solve_sequential(p, 100, 5, 2, [0.0, 0.0])
    with pytest.raises(ValueError):
        solve_sequential(p, 100, 5, 0)


@settings(max_examples=25, deadline=None)
@given(mu=st.floats(-1.5, -0.01), sigma=st.floats(0.5, 20), N=st.integers(10, 2000), I=st.integers(1, 12))
def test_sequential_monotone(mu, sigma, N, I):
    p = _program("a", mu, 1.0, sigma)
    by_t = [solve_sequential(p, N, I, T).value for T in (1, 2, 3)]
    assert all(b >= a - 1e-12 for a, b in zip(by_t, by_t[1:]))
    assert solve_sequential(p, N, I + 1, 2).value >= by_t[1] - 1e-12
    assert solve_sequential(p, N + 50, I, 2).value >= by_t[1] - 1e-12
