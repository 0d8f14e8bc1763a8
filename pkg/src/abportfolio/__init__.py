"""Planning tools for portfolios of A/B tests: priors over treatment effects,
the value of a test as a function of its size, optimal allocation of units
across ideas and programs, and calibrated ship thresholds."""

__version__ = "0.1.0"

from .allocation import (
    AllocationProblem,
    DPSolution,
    MetaproductionResult,
    PooledProgram,
    PooledSolution,
    UnitPool,
    dp_frontier,
    metaproduction_closed,
    metaproduction_curve,
    metaproduction_direct,
    regret_per_idea_limit,
    solve_dp,
    solve_dp_multiplicity,
    solve_pooled_concave,
)
from .decisions import (
    DecisionThreshold,
    implied_b_for_alpha,
    implied_cost_for_alpha,
    loss_averse_cutoff_gaussian,
    minimax_constant,
    minimax_risk,
    minimax_rule,
    optimal_threshold_gaussian_linear,
    optimal_threshold_generic,
    pass_probability,
    ship_probability,
)
from .exceptions import (
    ABPortfolioError,
    BracketError,
    DegeneratePriorWarning,
    InfeasibleError,
    InfiniteRiskError,
    InsufficientDataError,
    MemoryBudgetError,
    NumericalFailure,
    PriorAssumptionWarning,
)
from .exclusive import (
    ExclusiveResult,
    exclusive_value_approx,
    exclusive_value_mc,
    exclusive_value_quad,
    optimize_I0,
)
from .portfolio import (
    ProgramSpec,
    Schedule,
    solve_sequential,
    solve_shared_allocation,
    solve_shared_ideas,
)
from .priors import (
    CustomUtility,
    DiscretePrior,
    ExperimentRecord,
    GaussianPrior,
    Linear,
    LossAverse,
    NoiseModel,
    PriorFit,
    fit_gaussian_mle,
    mle_variance_equal_allocation,
    posterior_expected_utility,
    posterior_moments_gaussian,
    read_records_csv,
    read_records_json,
)
from .production import (
    CostModel,
    CustomTestingCost,
    FixedTestingCost,
    ProductionHandle,
    find_x_star,
    production_gaussian_linear,
    production_generic,
    production_monte_carlo,
    production_pvalue_rule,
    rule_value,
)

__all__ = [
    "__version__",
    "AllocationProblem",
    "DPSolution",
    "MetaproductionResult",
    "PooledProgram",
    "PooledSolution",
    "UnitPool",
    "dp_frontier",
    "metaproduction_closed",
    "metaproduction_curve",
    "metaproduction_direct",
    "regret_per_idea_limit",
    "solve_dp",
    "solve_dp_multiplicity",
    "solve_pooled_concave",
    "DecisionThreshold",
    "implied_b_for_alpha",
    "implied_cost_for_alpha",
    "loss_averse_cutoff_gaussian",
    "minimax_constant",
    "minimax_risk",
    "minimax_rule",
    "optimal_threshold_gaussian_linear",
    "optimal_threshold_generic",
    "pass_probability",
    "ship_probability",
    "ABPortfolioError",
    "BracketError",
    "DegeneratePriorWarning",
    "InfeasibleError",
    "InfiniteRiskError",
    "InsufficientDataError",
    "MemoryBudgetError",
    "NumericalFailure",
    "PriorAssumptionWarning",
    "ExclusiveResult",
    "exclusive_value_approx",
    "exclusive_value_mc",
    "exclusive_value_quad",
    "optimize_I0",
    "ProgramSpec",
    "Schedule",
    "solve_sequential",
    "solve_shared_allocation",
    "solve_shared_ideas",
    "CustomUtility",
    "DiscretePrior",
    "ExperimentRecord",
    "GaussianPrior",
    "Linear",
    "LossAverse",
    "NoiseModel",
    "PriorFit",
    "fit_gaussian_mle",
    "mle_variance_equal_allocation",
    "posterior_expected_utility",
    "posterior_moments_gaussian",
    "read_records_csv",
    "read_records_json",
    "CostModel",
    "CustomTestingCost",
    "FixedTestingCost",
    "ProductionHandle",
    "find_x_star",
    "production_gaussian_linear",
    "production_generic",
    "production_monte_carlo",
    "production_pvalue_rule",
    "rule_value",
]
