"""
Exception hierarchy for game construction, evaluation and benchmarking.
"""

from typing import Optional


class MOSGError(Exception):
    """Base exception for security-game operations."""

    pass


class InstanceValidationError(MOSGError):
    """Raised when a game instance violates one of its invariants."""

    pass


class ArgumentError(MOSGError, ValueError):
    """Raised for out-of-range indices, mismatched lengths or empty inputs."""

    pass


class ConfigError(MOSGError, ValueError):
    """Raised when a solver or benchmark configuration is inconsistent."""

    pass


class InfeasibleCoverageError(MOSGError):
    """Raised when a coverage vector spends more than the budget."""

    def __init__(self, violation: float, message: Optional[str] = None):
        self.violation = float(violation)
        super().__init__(message or f"Coverage exceeds budget by {self.violation:.6g}")


class SaturationError(MOSGError):
    """Raised when an indifference coverage would exceed probability 1."""

    def __init__(self, attacker: int, target: int, value: float):
        self.attacker = attacker
        self.target = target
        self.value = float(value)
        super().__init__(
            f"Attacker {attacker}: indifference coverage {self.value:.6g} "
            f"on target {target} exceeds 1"
        )


class BoundsError(MOSGError):
    """Raised when an I-code gene falls outside its allowed range."""

    pass


class UndefinedGapError(MOSGError):
    """Raised when the payoff gap is requested for an attack set with one member."""

    pass


class OracleGuardError(MOSGError):
    """Raised when an instance is too large for exhaustive enumeration."""

    def __init__(self, num_codes: int, max_combinations: int):
        self.num_codes = int(num_codes)
        self.max_combinations = int(max_combinations)
        super().__init__(
            f"Oracle refused: {self.num_codes} codes, up to {self.max_combinations} "
            "coverage combinations per code"
        )


class SolverTimeoutError(MOSGError):
    """Raised when a solver run exceeds its wall-clock limit."""

    def __init__(self, elapsed: float, limit: float):
        self.elapsed = float(elapsed)
        self.limit = float(limit)
        super().__init__(f"Time limit of {limit:.1f}s exceeded after {elapsed:.1f}s")


class DataFileError(MOSGError):
    """Raised when an instance, front or run-configuration file cannot be read."""

    pass
