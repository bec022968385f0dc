"""
Error hierarchy.
Every error knows the process exit code the CLI reports for it:
1 for configuration/usage problems, 2 for numeric failures.
"""
from typing import Optional


class LesaError(Exception):
    exit_code = 2


class ConfigError(LesaError, ValueError):
    """Bad configuration or usage."""
    exit_code = 1

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PrototypeError(ConfigError):
    """Invalid g-coefficient ladder."""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        super().__init__(message, key="g")


class SchemaError(ConfigError):
    """CSV input does not match a known table schema."""


class NumericError(LesaError, ArithmeticError):
    exit_code = 2


class SynthesisError(NumericError):
    def __init__(self, message: str, element: Optional[str] = None):
        self.element = element
        super().__init__(message)


class BiasError(NumericError):
    """Snake bias at an inductance singularity or outside the reachable branch."""


class ThresholdError(NumericError):
    """Coupled-mode matrix singular: parametric oscillation threshold."""

    def __init__(self, message: str, frequency_hz: Optional[float] = None):
        self.frequency_hz = frequency_hz
        super().__init__(message)


class ConversionError(NumericError):
    pass


class NoBandError(NumericError):
    pass


class PumpError(NumericError):
    pass


class NotFoundError(NumericError):
    pass


class QuadratureError(NumericError):
    pass


class PoleError(NumericError):
    pass


class ConvergenceError(NumericError):
    pass
