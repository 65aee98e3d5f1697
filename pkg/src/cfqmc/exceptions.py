"""Exception types raised across the package."""


class CFQMCError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(CFQMCError, ValueError):
    pass


class GridSizeMismatchError(CFQMCError, ValueError):
    """Requested size is not ``m ** dims`` for the declared grid resolution."""


class BudgetExceededError(CFQMCError, RuntimeError):
    """Exact enumeration would exceed the configured operation budget."""


class InsufficientBudgetError(CFQMCError, ValueError):
    pass


class SingularSystemError(CFQMCError, ArithmeticError):
    pass


class UnknownNameError(CFQMCError, KeyError):
    """Unknown test function or estimator method."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DegenerateFitError(CFQMCError, ValueError):
    """Fewer than two usable rows remain for a log-log fit."""


class ConfigError(CFQMCError, ValueError):
    pass
