"""Exception hierarchy shared across the library.

Every error raised by cohlaw derives from :class:`CohlawError`, so callers can
catch one type. Most leaves also derive from the matching builtin (ValueError
or RuntimeError) to stay friendly to generic handlers.
"""

from __future__ import annotations


class CohlawError(Exception):
    """Base class for all cohlaw errors."""


class ParameterError(CohlawError, ValueError):
    """A distribution or algorithm parameter is outside its valid range."""


class ShapeError(CohlawError, ValueError):
    """Matrix dimensions are too small or mutually inconsistent."""


class DomainError(CohlawError, ValueError):
    """A numerical argument lies outside the mathematical domain."""


class DegenerateColumnError(CohlawError, ValueError):
    """A column is constant (centered mode) or identically zero (uncentered).

    Such columns make the correlation undefined. They occur with probability
    zero under the supported column distributions, so hitting one signals bad
    input rather than bad luck.
    """

    def __init__(self, column: int, reason: str):
        self.column = column
        self.reason = reason
        super().__init__(f"column {column} is degenerate: {reason}")


class DiscreteLawError(CohlawError, ValueError):
    """A density was requested for a law that is discrete (two rows, centered).

    The correlation of mean-subtracted length-2 columns is always +1 or -1;
    use the two-point law from small_n_law(2) instead of pdf/tail quantities.
    """


class InfeasibleThresholdError(CohlawError, ValueError):
    """No threshold on the coherence scale realizes the requested level."""


class FileFormatError(CohlawError, ValueError):
    """A matrix file is malformed: bad magic, version, or truncated payload."""


class ResourceBudgetError(CohlawError, RuntimeError):
    """Estimated floating-point work exceeds the configured budget."""

    def __init__(self, estimate: float, budget: float):
        self.estimate = estimate
        self.budget = budget
        super().__init__(
            f"estimated work {estimate:.3e} pair-flops exceeds budget {budget:.3e}; "
            f"raise the budget explicitly to run this configuration"
        )
