"""Several experimentation programs and several periods.

Programs can share an allocation pool (split units across programs), share
an idea-generation budget (split new ideas across programs), or a single
program can spread its ideas over time.
"""

from dataclasses import dataclass, field

import numpy as np

from .allocation import (
    AllocationProblem,
    backtrack,
    dp_frontier,
    dp_stages,
    solve_dp,
)
from .exceptions import ABPortfolioError
from .priors import Linear, NoiseModel
from .production import CostModel, ProductionHandle


@dataclass(frozen=True)
class ProgramSpec:
    name: str
    prior: object
    sigma: float
    I: int = 0
    N: int = 0
    weight: float = 1.0
    utility: object = field(default_factory=Linear)
    cost: CostModel = field(default_factory=CostModel)

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError(f"program {self.name!r}: weight must be > 0")
        if self.I < 0 or self.N < 0:
            raise ValueError(f"program {self.name!r}: I and N must be >= 0")

    @property
    def handle(self):
        return ProductionHandle(self.prior, NoiseModel(self.sigma), self.utility, self.cost)


class ProgramError(ABPortfolioError):
    def __init__(self, name, err):
        super().__init__(f"program {name!r}: {err}")
        self.program = name
        self.__cause__ = err


@dataclass(frozen=True)
class SharedAllocation:
    value: float
    units: tuple
    allocations: tuple
    frontiers: tuple = field(repr=False)


def program_frontier(program, N, block):
    """``F_p(n)`` on the grid ``n = 0, block, ..., N`` (zeros if no ideas)."""
    m = N // block
    if program.I == 0:
        return np.zeros(m + 1)
    try:
        _, row = dp_frontier(AllocationProblem(program.I, max(N, block), block, program.handle))
    except Exception as err:
        raise ProgramError(program.name, err) from err
    return row[: m + 1]


def solve_shared_allocation(programs, N, block=1):
    """Split a shared pool of ``N`` units across programs.

    Each program's best value for every pool size on the block grid comes
    from its own allocation DP; an outer DP over programs then picks the
    split. Ties give fewer units to later programs.
    """
    if N < 1 or block < 1:
        raise ValueError("need N >= 1 and block >= 1")
    m = N // block
    frontiers = [program_frontier(p, N, block) for p in programs]
    tables = [p.weight * fr for p, fr in zip(programs, frontiers)]
    row, choice = dp_stages(tables, m, exact=True)
    blocks = backtrack(choice, m)
    units = tuple(int(b * block) for b in blocks)
    allocations = []
    for p, n_p in zip(programs, units):
        if p.I == 0 or n_p == 0:
            allocations.append(tuple([0] * p.I))
            continue
        try:
            allocations.append(solve_dp(AllocationProblem(p.I, n_p, block, p.handle)).allocation)
        except Exception as err:
            raise ProgramError(p.name, err) from err
    return SharedAllocation(float(row[m]), units, tuple(allocations), tuple(frontiers))


def idea_value_curve(program, I):
    """``F_p(j, N_p)`` for ``j = 0..I`` from the equal-split metaproduction."""
    out = np.zeros(I + 1)
    if program.N < 1 or I < 1:
        return out
    try:
        f = program.handle
        j = np.arange(1, I + 1)
        n_per = (program.N // j).astype(float)
        vals = j * np.asarray(f(n_per), dtype=float)
    except Exception as err:
        raise ProgramError(program.name, err) from err
    # running max: testing only the best prefix count of ideas is always allowed
    out[1:] = np.maximum.accumulate(vals)
    return out


@dataclass(frozen=True)
class SharedIdeas:
    value: float
    ideas: tuple
    curves: tuple = field(repr=False)


def solve_shared_ideas(programs, I):
    """Split a budget of ``I`` new ideas across programs with fixed pools,
    maximizing ``sum_p weight_p * F_p(I_p, N_p)`` subject to ``sum_p I_p <= I``.

    On ties the later program receives more ideas, so the whole budget is
    handed out whenever extra ideas are worthless rather than harmful.
    """
    if I < 0:
        raise ValueError("I must be >= 0")
    curves = [idea_value_curve(p, I) for p in programs]
    if I == 0:
        return SharedIdeas(0.0, tuple(0 for _ in programs), tuple(curves))
    tables = [p.weight * c for p, c in zip(programs, curves)]
    row, choice = dp_stages(tables, I, exact=False, prefer="large")
    ideas = tuple(backtrack(choice, I))
    return SharedIdeas(float(row[I]), ideas, tuple(curves))


@dataclass(frozen=True)
class Schedule:
    ideas_per_period: tuple
    values_per_period: tuple
    weights: tuple
    value: float

    @property
    def T(self):
        return len(self.ideas_per_period)


def solve_sequential(program, N, I, T, weights=None):
    """Spread ``I`` ideas over ``T`` periods with ``N`` units per period.

    ``M(t, r) = max_j w_t F(j, N) + M(t+1, r-j)`` with ``M(T+1, .) = 0``.
    Ties test fewer ideas now. Weights must be non-negative; ``w_t = T - t``
    credits an idea shipped in period ``t`` for the remaining periods.
    """
    if T < 1 or N < 1 or I < 0:
        raise ValueError("need T >= 1, N >= 1 and I >= 0")
    weights = np.ones(T) if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (T,) or np.any(weights < 0) or not np.any(weights > 0):
        raise ValueError("weights must be T non-negative numbers, not all zero")
    curve = idea_value_curve(ProgramSpec(program.name, program.prior, program.sigma, I, N,
                                         utility=program.utility, cost=program.cost), I)
    # process periods last-to-first so backtracking decides period 1 first
    tables = [w * curve for w in weights[::-1]]
    row, choice = dp_stages(tables, I, exact=False, prefer="small")
    ideas = tuple(backtrack(choice, I)[::-1])
    values = tuple(float(w * curve[j]) for w, j in zip(weights, ideas))
    return Schedule(ideas, values, tuple(float(w) for w in weights), float(row[I]))
