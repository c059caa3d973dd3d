"""Exception hierarchy shared by every ramac module."""

from __future__ import annotations


class RamacError(Exception):
    """Base class for all ramac errors."""


class DomainError(RamacError, ValueError):
    """An argument lies outside the domain of the operation."""


class MissingParameterError(RamacError, ValueError):
    """A parameter required by the chosen configuration was not supplied."""


class NoSolutionError(RamacError):
    """A numeric search found no solution inside its bracket."""


class NonUniqueEquilibriumError(RamacError):
    """The chain has no unique stationary distribution."""


class DegenerateLoadError(RamacError, ZeroDivisionError):
    """Acceptance-type metrics are undefined because the offered load is zero."""


class ComparisonError(RamacError):
    """A simulation result and an analytic solution describe different scenarios."""


class ScenarioError(RamacError, ValueError):
    """A scenario file or preset failed validation.

    ``field`` names the offending key when one can be identified.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ConvergenceError(RamacError):
    """A fixed-point solve did not converge.

    Carries the last iterate and its residual so callers can inspect or
    report the failed point instead of losing it.
    """

    def __init__(self, message: str, last_iterate, residual: float, iterations: int):
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
