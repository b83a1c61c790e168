"""
Exception types raised by the transmute package.

Every error carries the name of the module that raised it so the CLI can
report "[module] message" and pick an exit status.
"""

from typing import Optional


class TransmuteError(RuntimeError):
    """Base class for all package errors."""

    module = "transmute"

    def __init__(self, message: str, module: Optional[str] = None):
        super().__init__(message)
        if module is not None:
            self.module = module
        self.message = message

    def __str__(self) -> str:
        return f"[{self.module}] {self.message}"


class ConfigError(TransmuteError, ValueError):
    """Invalid job configuration or input file."""

    module = "cli"


class NumericalError(TransmuteError):
    """A numerical construction could not be completed."""


class GridError(TransmuteError, ValueError):
    module = "grid_calculus"


class BasisError(NumericalError, ValueError):
    """The particular solution vanishes or is not normalizable."""

    module = "grid_calculus"


class SolverError(NumericalError):
    module = "spps_solver"


class JetError(TransmuteError, ValueError):
    """A potential or function jet is too short or malformed."""

    module = "taylor_coefficients"


class FitError(NumericalError):
    module = "kernel_engine"


class RankDeficientError(FitError):
    """The basis traces are numerically dependent from `order` onwards."""

    def __init__(self, message: str, order: int):
        super().__init__(message)
        self.order = order


class SpectralError(NumericalError):
    module = "spectral_solver"
