"""Exception hierarchy shared by all modules.

The CLI maps these onto distinct process exit codes, so library code
should raise the most specific class that applies.
"""


class ErwdError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ErwdError):
    """Parameters outside the mathematical domain (bad beta/mu/d, divergent quantity)."""

    exit_code = 3


class DivergenceError(DomainError):
    """A requested quantity is infinite in the given dimension (e.g. d <= 2n)."""


class BudgetError(ErwdError):
    """The requested computation exceeds its work or memory budget."""

    exit_code = 4


class AccuracyError(ErwdError):
    """A numeric routine could not reach its accuracy target."""

    exit_code = 5
