"""Allocating a pool of units across candidate ideas.

Exact dynamic programs over (ideas x unit blocks), the equal-split
metaproduction function and its closed form, per-idea regret limits, and a
greedy solver for multi-pool problems with concave production functions.
"""

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import InfeasibleError, MemoryBudgetError, NumericalFailure
from .priors import expected_positive_part

DEFAULT_MEMORY_BUDGET = 2 * 1024 ** 3


@dataclass(frozen=True)
class AllocationProblem:
    """Split ``N`` units across at most ``I`` ideas in blocks of ``c0`` units."""

    I: int
    N: int
    c0: int
    f: object

    def __post_init__(self):
        if self.I < 1 or self.N < 1:
            raise ValueError(f"need I >= 1 and N >= 1, got I={self.I}, N={self.N}")
        if not 1 <= self.c0 <= self.N:
            raise ValueError(f"need 1 <= c0 <= N, got c0={self.c0}, N={self.N}")

    @property
    def blocks(self):
        return self.N // self.c0

    def f_table(self, blocks=None):
        m = self.blocks if blocks is None else blocks
        return production_table(self.f, m, self.c0)


@dataclass(frozen=True)
class DPSolution:
    value: float
    allocation: tuple
    tests_run: int

    def run_length(self):
        """Allocation as ``[[units, count], ...]`` runs, in test order."""
        runs = []
        for a in self.allocation:
            if runs and runs[-1][0] == a:
                runs[-1][1] += 1
            else:
                runs.append([a, 1])
        return runs


def production_table(f, blocks, c0):
    """``f(j * c0)`` for ``j = 0..blocks``; ``f`` may be a handle or an array."""
    if callable(f):
        table = np.asarray(f(np.arange(blocks + 1, dtype=float) * c0), dtype=float)
    else:
        table = np.asarray(f, dtype=float)[: blocks + 1]
        if table.size < blocks + 1:
            raise ValueError(f"production table has {table.size} entries, need {blocks + 1}")
    bad = np.flatnonzero(~np.isfinite(table))
    if bad.size:
        raise NumericalFailure(f"non-finite production value at n={int(bad[0]) * c0}")
    return table


def _check_budget(rows, cols, budget):
    need = rows * cols * (8 + 4)
    if need > budget:
        raise MemoryBudgetError(
            f"DP table needs {need / 2**20:.1f} MiB (> budget {budget / 2**20:.1f} MiB); "
            f"increase the block size c0 by a factor of about {math.ceil(need / budget)}"
        )


def dp_stages(tables, total, exact=True, prefer="small", memory_budget=DEFAULT_MEMORY_BUDGET):
    """Stage-wise max-plus recursion ``M(a, b) = max_j M(a-1, b-j) + tables[a][j]``.

    ``j`` ranges over ``0..min(b, len(tables[a]) - 1)``. With ``exact`` the
    budget must be used in full (``M(0, b > 0) = -inf``); otherwise unused
    budget is allowed. ``prefer`` picks the smaller or larger maximizing
    ``j`` on exact ties. Returns the last row and the argmax table.
    """
    n_stages = len(tables)
    _check_budget(n_stages, total + 1, memory_budget)
    prev = np.zeros(total + 1)
    if exact:
        prev[1:] = -np.inf
    choice = np.zeros((n_stages, total + 1), dtype=np.int32)
    for a, table in enumerate(tables):
        table = np.asarray(table, dtype=float)
        cap = table.size - 1
        cur = np.empty(total + 1)
        row = choice[a]
        for b in range(total + 1):
            jmax = min(b, cap)
            cand = prev[b - jmax : b + 1][::-1] + table[: jmax + 1]
            if prefer == "small":
                j = int(np.argmax(cand))
            else:
                j = jmax - int(np.argmax(cand[::-1]))
            cur[b] = cand[j]
            row[b] = j
        prev = cur
    return prev, choice


def dp_tables(f_values, I, total, cap=None, memory_budget=DEFAULT_MEMORY_BUDGET):
    """Tabulate ``F(i, b) = max_{0 <= j <= min(b, cap)} F(i-1, b-j) + f[j]``.

    ``F(0, 0) = 0`` and ``F(0, b > 0) = -inf`` encode the equality
    constraint. Returns the final row ``F(I, .)`` and the argmax table
    (smallest maximizing ``j`` on ties).
    """
    f_values = np.asarray(f_values, dtype=float)
    cap = total if cap is None else min(cap, total)
    if f_values.size < cap + 1:
        raise ValueError("production table shorter than the per-test cap")
    return dp_stages([f_values[: cap + 1]] * I, total, memory_budget=memory_budget)


def backtrack(choice, total):
    """Per-stage choices along the optimal path ending at budget ``total``."""
    alloc = []
    b = total
    for i in range(choice.shape[0] - 1, -1, -1):
        j = int(choice[i, b])
        alloc.append(j)
        b -= j
    return alloc[::-1]


def _solve(problem, cap_blocks, total_blocks, memory_budget):
    # fail on the table size before paying for the production values
    _check_budget(min(problem.I, max(total_blocks, 1)), total_blocks + 1, memory_budget)
    f = problem.f_table(max(cap_blocks, 0))
    I_eff = problem.I
    # beyond ``total`` tests the extra ones can only receive 0 units
    if f[0] == 0.0:
        I_eff = min(problem.I, max(total_blocks, 1))
    row, choice = dp_tables(f, I_eff, total_blocks, cap_blocks, memory_budget)
    if not np.isfinite(row[total_blocks]):
        raise InfeasibleError(
            f"cannot place {total_blocks} blocks on {problem.I} tests with at most {cap_blocks} each"
        )
    blocks = backtrack(choice, total_blocks) + [0] * (problem.I - I_eff)
    value = float(row[total_blocks]) + (problem.I - I_eff) * float(f[0])
    alloc = tuple(j * problem.c0 for j in blocks)
    return DPSolution(value, alloc, sum(1 for a in alloc if a > 0))


def solve_dp(problem, memory_budget=DEFAULT_MEMORY_BUDGET):
    """Exact optimum of ``sum_i f(n_i)`` with ``sum_i n_i = N`` over multiples
    of ``c0`` (units beyond the last full block are left unused)."""
    m = problem.blocks
    return _solve(problem, m, m, memory_budget)


def solve_dp_multiplicity(problem, k, memory_budget=DEFAULT_MEMORY_BUDGET):
    """Units may join up to ``k`` tests: ``sum_i n_i = k N`` with ``n_i <= N``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k!r}")
    m = problem.blocks
    return _solve(problem, m, k * m, memory_budget)


def dp_frontier(problem, memory_budget=DEFAULT_MEMORY_BUDGET):
    """``F(I, n)`` for every ``n`` on the block grid ``0, c0, ..., N``."""
    f = problem.f_table()
    m = problem.blocks
    I_eff = min(problem.I, max(m, 1)) if f[0] == 0.0 else problem.I
    row, _ = dp_tables(f, I_eff, m, m, memory_budget)
    return np.arange(m + 1) * problem.c0, row + (problem.I - I_eff) * f[0]


# --- metaproduction -------------------------------------------------------------


def metaproduction_direct(I, N, f):
    """``max_{1 <= i <= I} i * f(floor(N / i))``; ties go to the smaller ``i``.

    Returns ``(value, i_star)``.
    """
    if I < 1:
        raise ValueError(f"I must be >= 1, got {I!r}")
    i = np.arange(1, int(I) + 1)
    vals = i * np.asarray(f((N // i).astype(float)), dtype=float)
    k = int(np.argmax(vals))
    return float(vals[k]), int(i[k])


def metaproduction_curve(I, N, f):
    """``i * f(N / i)`` for ``i = 1..I`` with a real-valued split."""
    i = np.arange(1, int(I) + 1, dtype=float)
    return i, i * np.asarray(f(N / i), dtype=float)


@dataclass(frozen=True)
class MetaproductionResult:
    value: float
    i_star: float
    regime: str


def metaproduction_closed(I, N, analysis, f=None):
    """Program value from the location of ``x_star`` alone.

    ``go_big`` (one test gets everything) when ``x_star >= N``; ``lean``
    (all ``I`` ideas, equal split) when ``x_star <= N / I``; otherwise
    ``interior`` with ``N / x_star`` tests each at the most efficient size.
    """
    if f is None:
        f = analysis.handle
    elif f != analysis.handle:
        raise ValueError("analysis was computed for a different production function")
    if I < 1:
        return MetaproductionResult(0.0, 0.0, "none")
    x = analysis.x_star
    if x >= N:
        return MetaproductionResult(float(f(N)), 1.0, "go_big")
    if x <= N / I:
        return MetaproductionResult(float(I * f(N / I)), float(I), "lean")
    return MetaproductionResult(N * analysis.ratio_at_x_star, N / x, "interior")


def regret_per_idea_limit(kappa, prior, analysis, f=None):
    """Large-program limit of the per-idea gap between shipping every idea
    with a positive effect and the best Bayes program, as ``N / I -> kappa``."""
    if not (kappa > 0 and math.isfinite(kappa)):
        raise ValueError(f"kappa must be positive and finite, got {kappa!r}")
    f = analysis.handle if f is None else f
    full = expected_positive_part(prior)
    if kappa <= analysis.x_star:
        return full - kappa * analysis.ratio_at_x_star
    return full - float(f(kappa))


# --- pooled concave problem -------------------------------------------------------


@dataclass(frozen=True)
class PooledProgram:
    f: object
    I: int
    x_hat: float = 0.0
    excluded: frozenset = field(default_factory=frozenset)
    name: str = ""


@dataclass(frozen=True)
class UnitPool:
    N: int
    multiplicity: int = 1

    @property
    def capacity(self):
        return self.N * self.multiplicity


@dataclass
class PooledSolution:
    value: float
    # per program: array (I_p, K) of units from each pool
    units: list
    totals: list
    rounded_down: list

    def test_sizes(self, p):
        return self.totals[p]


class _Flow:
    """Block-level assignment of tests to pools with augmenting-path moves."""

    def __init__(self, tests, pools, allowed, cap):
        self.x = np.zeros((len(tests), len(pools)), dtype=np.int64)
        self.free = np.array([p for p in pools], dtype=np.int64)
        self.allowed = allowed
        self.cap = cap

    def augment(self, t):
        """Add one block to test ``t``, rerouting other tests if needed."""
        n_tests, n_pools = self.x.shape
        parent_pool = {}
        parent_test = {}
        seen_tests = {t}
        queue = deque([t])
        while queue:
            a = queue.popleft()
            for k in self.allowed[a]:
                if k in parent_pool or self.x[a, k] >= self.cap[k]:
                    continue
                parent_pool[k] = a
                if self.free[k] > 0:
                    self._apply(k, parent_pool, parent_test)
                    return True
                for b in np.flatnonzero(self.x[:, k] > 0):
                    b = int(b)
                    if b not in seen_tests:
                        seen_tests.add(b)
                        parent_test[b] = k
                        queue.append(b)
        return False

    def _apply(self, k, parent_pool, parent_test):
        self.free[k] -= 1
        while True:
            a = parent_pool[k]
            self.x[a, k] += 1
            if a not in parent_test:
                return
            k = parent_test[a]
            self.x[a, k] -= 1


def solve_pooled_concave(programs: Sequence[PooledProgram], pools: Sequence[UnitPool], block=1, seed_at_x_hat=True):
    """Greedy block ascent for the multi-pool allocation problem.

    Each test draws units from the pools its program is not excluded from;
    pool ``k`` supplies at most ``multiplicity * N_k`` unit-enrollments and at
    most ``N_k`` to any one test. Tests are first seeded at ``x_hat`` (rounded
    up to whole blocks) so every production function is concave over the
    search region; then the block with the largest marginal gain is added
    repeatedly, rerouting earlier assignments along augmenting paths when a
    pool fills up. Exact for concave production functions on this
    capacity structure. Tests left below ``x_hat`` are rounded down to 0.
    """
    if block < 1:
        raise ValueError("block must be >= 1")
    tests = []
    for p, prog in enumerate(programs):
        tests.extend((p, i) for i in range(prog.I))
    pool_blocks = [pool.capacity // block for pool in pools]
    cap = [pool.N // block for pool in pools]
    allowed = [
        [k for k in range(len(pools)) if k not in programs[p].excluded] for p, _ in tests
    ]
    flow = _Flow(tests, pool_blocks, allowed, cap)
    tables = {}

    def f_blocks(p, j):
        key = (p, j)
        if key not in tables:
            tables[key] = float(programs[p].f(float(j * block)))
        return tables[key]

    level = np.zeros(len(tests), dtype=np.int64)
    if seed_at_x_hat:
        for t, (p, _) in enumerate(tests):
            if not allowed[t]:
                continue
            need = math.ceil(programs[p].x_hat / block)
            for _ in range(need):
                if not flow.augment(t):
                    used = [k for k in range(len(pools)) if flow.free[k] == 0]
                    raise InfeasibleError(
                        f"cannot seed test {t} of program {p} at x_hat={programs[p].x_hat}; "
                        f"binding pools: {used}"
                    )
                level[t] += 1

    heap = []
    for t, (p, _) in enumerate(tests):
        if allowed[t]:
            gain = f_blocks(p, level[t] + 1) - f_blocks(p, level[t])
            heapq.heappush(heap, (-gain, t))
    while heap:
        neg_gain, t = heapq.heappop(heap)
        if -neg_gain <= 0:
            break
        if not flow.augment(t):
            continue
        level[t] += 1
        p = tests[t][0]
        gain = f_blocks(p, level[t] + 1) - f_blocks(p, level[t])
        heapq.heappush(heap, (-gain, t))

    units, totals, rounded = [], [], []
    value = 0.0
    offset = 0
    for p, prog in enumerate(programs):
        x = flow.x[offset : offset + prog.I] * block
        tot = x.sum(axis=1)
        low = np.flatnonzero((tot > 0) & (tot < prog.x_hat))
        x[low] = 0
        tot = x.sum(axis=1)
        units.append(x)
        totals.append(tot)
        rounded.append([int(i) for i in low])
        value += math.fsum(float(prog.f(float(n))) for n in tot)
        offset += prog.I
    return PooledSolution(value, units, totals, rounded)
