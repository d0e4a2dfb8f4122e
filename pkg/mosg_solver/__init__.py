"""
MOSG Solver
===========

Pareto fronts of multi-objective security games: attack-set
discretization, many-objective evolutionary search over I-codes,
greedy restoration and resource-minimizing refinement, plus the
metrics and benchmark harness to check them.
"""

from .game.core import GameInstance, fitness
from .game.errors import MOSGError
from .metrics import hypervolume, igd_plus
from .solver.moea import EAConfig, SolveResult, run, solve
from .utils.data_loader import load_instance, save_instance

__version__ = "0.2.0"
__all__ = [
    "EAConfig",
    "GameInstance",
    "MOSGError",
    "SolveResult",
    "fitness",
    "hypervolume",
    "igd_plus",
    "load_instance",
    "run",
    "save_instance",
    "solve",
]
