"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class BranchCutError(ValueError):
    """A complex power/root argument landed on (or crossed) the negative real axis."""


class ConvergenceError(RuntimeError):
    """A series did not satisfy the truncation rule within the term budget."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested accuracy.

    Carries the achieved error estimate so callers can report it.
    """

    def __init__(self, message: str, achieved: float = float("nan")):
        super().__init__(message)
        self.achieved = achieved


class TruncationBudgetError(RuntimeError):
    """A coefficient lattice would exceed its configured size cap."""


class ConfigError(ValueError):
    """A run configuration is structurally or physically invalid."""
