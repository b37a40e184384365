"""Exception types and the shared tolerance record."""
from dataclasses import dataclass


class BregmanError(Exception):
    """Base class for all solver errors."""


class DomainError(BregmanError, ValueError):
    """A point lies outside the (interior of the) domain of f."""


class DimensionError(BregmanError, ValueError):
    pass


class WeightError(BregmanError, ValueError):
    """Averaging weights are not positive or do not sum to one."""


class InfeasibleError(BregmanError):
    pass


class ConvergenceError(BregmanError, RuntimeError):
    pass


class EmptyGridError(BregmanError):
    pass


class DegenerateSample(BregmanError, ValueError):
    """A sample pair with x == y was passed where a ratio is formed."""


class StageError(BregmanError):
    """Failure inside one stage of a solver step; ``stage`` names it."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class Tolerances:
    atol: float = 1e-10
    rtol: float = 1e-9
    # Bregman distances in [-clamp, 0) are roundoff; below that is a bug.
    clamp: float = 1e-12
    weight_sum: float = 1e-12


DEFAULT_TOL = Tolerances()
