"""
Single solver runs for benchmark campaigns, and their scoring against a pooled reference.
"""

import logging
import time
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..game.core import GameInstance
from ..game.errors import SolverTimeoutError
from ..metrics import build_reference, score_front
from ..solver.moea import EAConfig, solve
from .generator import BenchConfig

logger = logging.getLogger(__name__)


@dataclass
class CellResult:
    """Outcome of one solver run."""

    fitness: np.ndarray
    runtime_ms: float
    eval_ms: float = float("nan")
    eval_ops: int = 0
    archive_size: int = 0
    timeout: bool = False


def campaign_seeds(bench: BenchConfig, seeds: Optional[Sequence[int]] = None) -> List[int]:
    """Explicit seeds, else ``repeats`` consecutive seeds from ``bench.seed``."""
    if seeds is not None:
        return [int(s) for s in seeds]
    return [bench.seed + k for k in range(bench.repeats)]


def ea_config_for_flags(
    base: EAConfig, discretization: bool, restoration: bool, refinement: bool
) -> EAConfig:
    """
    Map ablation flags onto solver settings.

    No discretization means the coverage genome; no restoration means
    random alternatives instead of BitOpt.
    """
    if not discretization:
        return replace(base, genome="coverage", restoration="bitopt", refine=False)
    return replace(
        base,
        genome="icode",
        restoration="bitopt" if restoration else "random",
        refine=refinement,
    )


def base_config(bench: BenchConfig, ea: Optional[EAConfig] = None) -> EAConfig:
    """
    Solver config for a campaign, capped at ``bench.time_cap`` minutes.

    Ablation flags switched off in ``bench`` override the solver settings;
    with all three on, ``ea`` runs as given.
    """
    config = ea if ea is not None else EAConfig.from_dict(bench.solver)
    flags = (bench.discretization, bench.restoration, bench.refinement)
    if not all(flags):
        config = ea_config_for_flags(config, *flags)
        logger.debug(
            f"Campaign flags {flags}: genome={config.genome}, "
            f"restoration={config.restoration}, refine={config.refine}"
        )
    limit = bench.time_cap * 60.0
    if config.time_limit is not None:
        limit = min(limit, config.time_limit)
    return replace(config, time_limit=limit, show_progress=False, track_history=False)


def run_cell(inst: GameInstance, config: EAConfig) -> CellResult:
    """
    Solve one instance in-process.

    Top-level so worker processes can pickle it. A time-cap hit becomes a
    timeout result with an empty front.
    """
    tick = time.perf_counter()
    try:
        result = solve(inst, config, workers=1)
    except SolverTimeoutError as e:
        logger.warning(f"Cell n={inst.num_attackers}, t={inst.num_targets} timed out: {e}")
        return CellResult(
            fitness=np.empty((0, inst.num_attackers)),
            runtime_ms=(time.perf_counter() - tick) * 1000.0,
            timeout=True,
        )
    return CellResult(
        fitness=result.archive.fitness_matrix(),
        runtime_ms=(time.perf_counter() - tick) * 1000.0,
        eval_ms=result.eval_seconds * 1000.0,
        eval_ops=result.eval_ops,
        archive_size=len(result.archive),
    )


def score_cells(cells: Sequence[CellResult], seed: int = 0) -> List[Tuple[float, float]]:
    """
    (hv, igdplus) per cell against the reference pooled from all their fronts.

    Timed-out or empty cells score NaN.
    """
    nan = (float("nan"), float("nan"))
    fronts = [c.fitness for c in cells if len(c.fitness)]
    if not fronts:
        return [nan] * len(cells)
    reference = build_reference(fronts)
    return [
        score_front(c.fitness, reference, seed=seed) if len(c.fitness) else nan for c in cells
    ]
