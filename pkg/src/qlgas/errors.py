"""Exception types shared across the package.

Two failure families are distinguished so batch drivers can map them to
distinct exit codes: bad inputs (rejected before any computation) and
numerical invariants broken during a computation.
"""


class QLGasError(Exception):
    """Base class for all package errors."""


class InputError(QLGasError, ValueError):
    """An argument, file, or configuration value was rejected."""


class InvariantViolation(QLGasError, ArithmeticError):
    """A numerical invariant (trace, positivity, stochasticity) failed."""
