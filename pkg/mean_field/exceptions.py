"""
Error types shared by every numeric app.

Each error carries the process exit code the ``emulate`` command reports
for it, so the command layer never has to inspect messages.
"""


class EmulationError(Exception):
    exit_code = 1


class DomainError(EmulationError, ValueError):
    """Input outside the domain of an operation (non-finite argument, T < 0, λ ≤ 0, ...)."""


class ConvergenceError(EmulationError):
    """A self-consistent solve failed; carries the temperature where it happened."""
    exit_code = 2

    def __init__(self, message, temperature=None, residual=None):
        super().__init__(message)
        self.temperature = temperature
        self.residual = residual


class NotBracketedError(EmulationError):
    """The critical-field search found a jump at every field of the grid."""
    exit_code = 2
