"""Exception types shared across the package."""


class EnumerationTooLarge(ValueError):
    """Joint action space exceeds the exact-enumeration guard."""


class NonFiniteValue(ValueError):
    """A utility or estimate value is NaN or infinite."""


class ProbabilityOutOfRange(ValueError):
    """A probability lies outside [0, 1]."""


class StepSizeOutOfRange(ValueError):
    """A step size rho is outside the half-open interval (0, 1]."""


class OracleUnavailable(RuntimeError):
    """No exact mixed-utility oracle applies to this game.

    Raised when an operation needs exact expected utilities but the game
    is neither small enough to enumerate nor a congestion game with a
    polynomial-time oracle.
    """


class MismatchedExperiments(ValueError):
    """Summaries being compared come from different games or horizons."""


class ConfigError(ValueError):
    """An experiment or game description file failed validation."""
