"""Exception types shared across the solver stack."""

from __future__ import annotations


class EntrofluxError(Exception):
    """Base class for all errors raised by this package."""


class InvalidState(EntrofluxError):
    """A state vector violates the realizability constraints of its model."""

    def __init__(self, message: str, cell: int | None = None, time: float | None = None):
        self.cell = cell
        self.time = time
        tags = []
        if cell is not None:
            tags.append(f"cell={cell}")
        if time is not None:
            tags.append(f"t={time:.6g}")
        super().__init__(message + (f" [{', '.join(tags)}]" if tags else ""))


class EvaluationError(EntrofluxError):
    """A residual or Jacobian evaluation failed (non-finite output or raised)."""

    def __init__(self, message: str, column: int | None = None):
        self.column = column
        if column is not None:
            message = f"{message} (jacobian column {column})"
        super().__init__(message)


class SolverDivergence(EntrofluxError):
    """An implicit solve exhausted its iteration or damping budget."""

    def __init__(
        self,
        message: str,
        best=None,
        residual_norm: float | None = None,
        cell: int | None = None,
    ):
        self.best = best
        self.residual_norm = residual_norm
        self.cell = cell
        tags = []
        if cell is not None:
            tags.append(f"cell={cell}")
        if residual_norm is not None:
            tags.append(f"|R|={residual_norm:.3e}")
        super().__init__(message + (f" [{', '.join(tags)}]" if tags else ""))


class NoBracket(EntrofluxError):
    """Bisection was requested on an interval without a sign change."""


class DisagreementError(EntrofluxError):
    """Two solution strategies for the same stage disagree beyond tolerance."""


class VacuumError(EntrofluxError):
    """The exact Riemann solution develops a vacuum region."""


class ConfigError(EntrofluxError):
    """A run configuration is inconsistent or cannot be parsed."""


class UnknownPreset(ConfigError):
    """Requested preset name is not defined."""
