"""Exception types shared across the package.

The CLI maps these onto exit codes: usage/config problems exit 2,
numerical failures exit 3, enumeration budgets exit 4.
"""


class QadsimError(Exception):
    """Base class for package-specific failures."""


class ParseError(QadsimError, ValueError):
    """Bad expression text; carries the character position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ConfigError(QadsimError, ValueError):
    """Invalid run configuration."""


class BudgetExceededError(QadsimError):
    """An enumeration or basis size exceeded its configured budget."""


class TailWeightError(QadsimError):
    """Coherent-state amplitude mass lost to truncation exceeds tolerance."""


class FloatBudgetError(QadsimError):
    """Exact integer value too large to convert to float64 without rounding."""


class EvolutionError(QadsimError):
    """Time integration produced non-finite amplitudes."""


class ConvergenceError(QadsimError):
    """Self-consistency iteration failed to converge."""
