"""Exception and warning types shared across InertiaKit."""

from __future__ import annotations

from pathlib import Path


class InertiaKitError(Exception):
    """Base class for every error raised by InertiaKit."""


class CapacityError(InertiaKitError):
    """An ECSR row would grow past the space reserved for it."""

    def __init__(self, row: int, needed: int, capacity: int) -> None:
        super().__init__(
            f"row {row} needs {needed} slots but only {capacity} were allocated"
        )
        self.row = row
        self.needed = needed
        self.capacity = capacity


class NonFiniteError(InertiaKitError, ArithmeticError):
    """A NaN or infinity was supplied or produced while factoring."""

    def __init__(self, message: str, row: int | None = None) -> None:
        super().__init__(message if row is None else f"{message} (row {row})")
        self.row = row


class InputFormatError(InertiaKitError, ValueError):
    """Malformed Matrix Market or permutation text."""

    def __init__(
        self, message: str, path: str | Path | None = None, line: int | None = None
    ) -> None:
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")
        self.path = None if path is None else str(path)
        self.line = line


class NotSymmetricError(InputFormatError):
    """Input matrix is numerically unsymmetric."""


class PermutationError(InertiaKitError, ValueError):
    """A permutation is not a bijection on 0..n-1."""


class ConvergenceError(InertiaKitError, RuntimeError):
    """An iterative reference solver ran out of sweeps."""


# ---- warnings -------------------------------------------------------------


class SingularMinorWarning(UserWarning):
    """A leading principal minor evaluated to exactly zero."""


class RetryBudgetWarning(UserWarning):
    """Shift nudging did not clear a singular minor within the retry budget."""


class MonotonicityWarning(UserWarning):
    """A shifted inertia count fell outside the bracket's counts."""


__all__ = [
    "CapacityError",
    "ConvergenceError",
    "InertiaKitError",
    "InputFormatError",
    "MonotonicityWarning",
    "NonFiniteError",
    "NotSymmetricError",
    "PermutationError",
    "RetryBudgetWarning",
    "SingularMinorWarning",
]
