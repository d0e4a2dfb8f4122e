"""
Ablation of the solver's components: discretization, restoration and refinement.
"""

import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ..game.errors import ConfigError
from ..solver.moea import EAConfig
from ..utils.parallel import WorkerPool
from .generator import BenchConfig, generate_instance
from .runner import base_config, campaign_seeds, ea_config_for_flags, run_cell, score_cells

logger = logging.getLogger(__name__)

ABLATION_COLUMNS = ["n", "t", "seed", "config", "hv", "igdplus", "runtime_ms", "timeout"]

# name -> (discretization, restoration, refinement)
ABLATION_VARIANTS: Dict[str, Tuple[bool, bool, bool]] = {
    "ccode": (False, False, False),
    "random": (True, False, False),
    "random+refine": (True, False, True),
    "bitopt": (True, True, False),
    "sdes": (True, True, True),
}


def variant_for_flags(bench: BenchConfig) -> str:
    """
    Name of the ablation variant a campaign's flags select.

    Raises:
        ConfigError: If no variant has these flags
    """
    flags = (bench.discretization, bench.restoration, bench.refinement)
    for name, variant in ABLATION_VARIANTS.items():
        if variant == flags:
            return name
    raise ConfigError(f"no ablation variant for flags {flags}")


def ablation_run(
    bench: BenchConfig,
    ea: Optional[EAConfig] = None,
    seeds: Optional[Sequence[int]] = None,
    variants: Optional[Sequence[str]] = None,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Run every ablation variant on one generated instance over several solver seeds.

    Args:
        bench: Instance size, seed and time cap
        ea: Base solver settings; ``bench.solver`` if omitted
        seeds: Solver seeds; ``repeats`` seeds from ``bench.seed`` if omitted
        variants: Subset of ABLATION_VARIANTS to run; all by default
        workers: Processes running cells concurrently

    Returns:
        DataFrame with ABLATION_COLUMNS, scored against the front pooled over all cells
    """
    names = list(variants) if variants is not None else list(ABLATION_VARIANTS)
    unknown = [v for v in names if v not in ABLATION_VARIANTS]
    if unknown:
        raise ConfigError(f"unknown ablation variants: {unknown}")

    inst = generate_instance(bench)
    base = base_config(bench, ea)
    seed_list = campaign_seeds(bench, seeds)
    plan = [(name, s) for s in seed_list for name in names]
    configs = [
        replace(ea_config_for_flags(base, *ABLATION_VARIANTS[name]), seed=s) for name, s in plan
    ]
    logger.info(
        f"Ablation on n={inst.num_attackers}, t={inst.num_targets}: "
        f"{len(names)} variants x {len(seed_list)} seeds"
    )

    with WorkerPool(workers) as pool:
        cells = pool.map(run_cell, [inst] * len(configs), configs)
    scores = score_cells(cells, seed=bench.seed)

    rows: List[dict] = []
    for (name, s), cell, (hv, igd) in zip(plan, cells, scores):
        rows.append(
            {
                "n": inst.num_attackers,
                "t": inst.num_targets,
                "seed": s,
                "config": name,
                "hv": hv,
                "igdplus": igd,
                "runtime_ms": cell.runtime_ms,
                "timeout": cell.timeout,
            }
        )
    return pd.DataFrame(rows, columns=ABLATION_COLUMNS)


def ablation_summary(table: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of hv and igdplus per variant."""
    return table.groupby("config", sort=False)[["hv", "igdplus"]].agg(["mean", "std"])
