# ipcondense/errors.py
# Exceptions shared by the exact-numerics, simulation and command layers.

from __future__ import annotations


class DomainError(ValueError):
    """Argument outside the mathematical domain of a quantity (phi >= 1, m >= rho, ...)."""


class UnsupportedRegimeError(ValueError):
    """Requested regime, speed or parameter range is not implemented."""


class ConfigError(ValueError):
    """Experiment configuration is invalid or inconsistent."""


class BudgetExceededError(MemoryError):
    def __init__(self, what: str, required_bytes: int, budget_bytes: int):
        self.what = what
        self.required_bytes = int(required_bytes)
        self.budget_bytes = int(budget_bytes)
        super().__init__(
            f"{what} needs {self.required_bytes} bytes, budget is {self.budget_bytes} bytes"
        )
