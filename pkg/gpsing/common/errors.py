# gpsing/common/errors.py

from typing import Any, Optional


class GpSingError(Exception):
    """Root of every error raised by the toolkit."""


# Input validation. These subclass ValueError so callers catching bad arguments keep working.

class RegimeViolation(GpSingError, ValueError):
    """
    A parameter lies outside the subcritical regime 0 < b < min{2, N}, 1 < p < 1 + (4 - 2b)/N, M > 0.

    Args:
        field (str): The offending parameter name.
        bound (str): The violated inequality, e.g. "p<2".
    """
    def __init__(self, field: str, bound: str, value: Any = None) -> None:
        self.field = field
        self.bound = bound
        self.value = value
        super().__init__(f"RegimeViolation({field}, {bound}): got {field}={value}")


class BadGridSpec(GpSingError, ValueError):
    pass


class WeightNotIntegrable(GpSingError, ValueError):
    pass


class GridMismatch(GpSingError, ValueError):
    pass


class NonpositiveAStar(GpSingError, ValueError):
    pass


class ZeroField(GpSingError, ValueError):
    pass


class UsageError(GpSingError, ValueError):
    pass


# Solver failures

class SolverError(GpSingError, RuntimeError):
    pass


class FlowDiverged(SolverError):
    pass


class MaxItersReached(SolverError):
    """
    The flow hit its iteration cap. The partial (unconverged) result is attached.

    Args:
        max_iters (int): The cap that was reached.
        result: The MinimizerResult at the last accepted iterate, flagged converged=False.
    """
    def __init__(self, max_iters: int, result: Optional[Any] = None) -> None:
        self.max_iters = max_iters
        self.result = result
        super().__init__(f"MaxItersReached({max_iters})")


class GridTooCoarse(SolverError):
    pass


class NoBracket(SolverError):
    pass


class BisectionStalled(SolverError):
    pass


class ProfileMissing(SolverError):
    pass


class NonpositiveTail(SolverError):
    pass


class IOFailure(GpSingError, OSError):
    pass
