class ABPortfolioError(Exception):
    """Base class for errors raised by this package."""


class NumericalFailure(ABPortfolioError, ArithmeticError):
    pass


class InsufficientDataError(ABPortfolioError, ValueError):
    pass


class InfeasibleError(ABPortfolioError, ValueError):
    pass


class BracketError(ABPortfolioError, ValueError):
    """A search bracket did not contain the optimum or root."""


class MemoryBudgetError(ABPortfolioError, MemoryError):
    pass


class InfiniteRiskError(ABPortfolioError, ValueError):
    pass


class DegeneratePriorWarning(UserWarning):
    pass


class PriorAssumptionWarning(UserWarning):
    pass


class BracketWidenedWarning(UserWarning):
    pass
