"""
Game model and discretization.
"""

from .core import (
    EPS,
    AttackGroup,
    AttackSet,
    Dominance,
    GameInstance,
    attack_group,
    attack_set,
    dominates,
    expected_attacker_payoff,
    expected_defender_payoff,
    fitness,
    pareto_indices,
    payoff_gap,
)
from .discretize import (
    IdealProfile,
    TargetOrder,
    code_lattice,
    decode,
    ideal_profile,
    indifference_coverage,
    target_order,
)
from .errors import (
    ArgumentError,
    BoundsError,
    ConfigError,
    DataFileError,
    InfeasibleCoverageError,
    InstanceValidationError,
    MOSGError,
    OracleGuardError,
    SaturationError,
    SolverTimeoutError,
    UndefinedGapError,
)

__all__ = [
    "EPS",
    "ArgumentError",
    "AttackGroup",
    "AttackSet",
    "BoundsError",
    "ConfigError",
    "DataFileError",
    "Dominance",
    "GameInstance",
    "IdealProfile",
    "InfeasibleCoverageError",
    "InstanceValidationError",
    "MOSGError",
    "OracleGuardError",
    "SaturationError",
    "SolverTimeoutError",
    "TargetOrder",
    "UndefinedGapError",
    "attack_group",
    "attack_set",
    "code_lattice",
    "decode",
    "dominates",
    "expected_attacker_payoff",
    "expected_defender_payoff",
    "fitness",
    "ideal_profile",
    "indifference_coverage",
    "pareto_indices",
    "payoff_gap",
    "target_order",
]
