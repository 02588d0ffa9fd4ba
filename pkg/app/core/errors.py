"""
Exception types shared across the toolkit.
"""
from typing import Optional


class SIQError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(SIQError, ValueError):
    """A model parameter is missing or outside its admissible range."""

    def __init__(self, field: str, bound: str, value: Optional[object] = None):
        self.field = field
        self.bound = bound
        self.value = value
        detail = f" (got {value!r})" if value is not None else ""
        super().__init__(f"Invalid parameter '{field}': must satisfy {bound}{detail}")


class ConfigError(SIQError, ValueError):
    """A configuration file is malformed or internally inconsistent."""


class UndefinedCriticalValueError(SIQError, ArithmeticError):
    """A critical responsibility/NPI level has a non-positive denominator."""

    def __init__(self, name: str, reason: str):
        self.name = name
        self.reason = reason
        super().__init__(f"Critical value '{name}' is undefined: {reason}")


class IntegrationError(SIQError, RuntimeError):
    """The ODE integrator produced a non-finite state."""
