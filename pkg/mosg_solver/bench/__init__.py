"""
Benchmark generation, exhaustive oracle, property suite, ablation and scaling drivers.
"""

from .ablation import (
    ABLATION_VARIANTS,
    ablation_run,
    ablation_summary,
    ea_config_for_flags,
    variant_for_flags,
)
from .generator import BenchConfig, generate_instance, payoff_table, shared_threat_instance
from .oracle import OracleFront, oracle_front, single_attacker_optimum
from .properties import PROPERTIES, PropertyReport, property_suite
from .runner import CellResult, run_cell
from .scaling import linear_fit, population_sweep, scaling_run

__all__ = [
    "ABLATION_VARIANTS",
    "PROPERTIES",
    "BenchConfig",
    "CellResult",
    "OracleFront",
    "PropertyReport",
    "ablation_run",
    "ablation_summary",
    "ea_config_for_flags",
    "generate_instance",
    "linear_fit",
    "oracle_front",
    "payoff_table",
    "population_sweep",
    "property_suite",
    "run_cell",
    "scaling_run",
    "shared_threat_instance",
    "single_attacker_optimum",
    "variant_for_flags",
]
