"""Exceptions raised by the library."""

from typing import Optional


class GChainsError(ValueError):
    """Base class for all library errors."""


class ConfigError(GChainsError):
    """Invalid experiment configuration. `field` is the dotted path of the culprit."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ModelError(GChainsError):
    """Invalid model parameters or unsupported alphabet."""


class HorizonError(GChainsError):
    """Bad horizon, window or budget arguments."""


class BudgetExceededError(GChainsError):
    """An exact computation would exceed its path budget."""

    def __init__(self, needed: int, budget: int, what: Optional[str] = None):
        self.needed = needed
        self.budget = budget
        label = f"{what}: " if what else ''
        super().__init__(f"{label}needs {needed} paths, budget is {budget}")
