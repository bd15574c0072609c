"""Shared exception types."""


class DomainError(ValueError):
    """An argument violates a documented precondition (CLI exit code 2)."""


class SolveError(RuntimeError):
    """Iterative solver failed; carries diagnostic state."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = list(residual_history or [])
