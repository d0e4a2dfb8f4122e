"""
Runtime scaling over (attackers, targets) grids and population-size sweeps.
"""

import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..game.errors import ArgumentError, ConfigError
from ..solver.moea import EAConfig
from ..utils.parallel import WorkerPool
from .ablation import variant_for_flags
from .generator import BenchConfig, generate_instance
from .runner import CellResult, base_config, campaign_seeds, run_cell, score_cells

logger = logging.getLogger(__name__)

SCALING_COLUMNS = [
    "n",
    "t",
    "seed",
    "runtime_ms",
    "eval_ms",
    "eval_ops",
    "archive_size",
    "hv",
    "igdplus",
    "timeout",
]
POPULATION_COLUMNS = ["pop_size", "seed", "hv", "igdplus", "runtime_ms"]


def scaling_run(
    bench: BenchConfig,
    cells: Optional[Sequence[Tuple[int, int]]] = None,
    ea: Optional[EAConfig] = None,
    seeds: Optional[Sequence[int]] = None,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Solve one generated instance per (n, t) cell under the campaign's time cap.

    Cell k uses instance seed ``bench.seed + k``; every cell repeats the
    same solver seeds. Metrics are scored per cell against the front
    pooled over that cell's runs.

    Args:
        bench: Resource ratio, seed, repeats and time cap
        cells: (attackers, targets) pairs; ``bench.grid`` if omitted
        ea: Base solver settings; ``bench.solver`` if omitted
        seeds: Solver seeds
        workers: Processes running cells concurrently

    Returns:
        DataFrame with SCALING_COLUMNS; timed-out runs have ``timeout=True``

    Raises:
        ConfigError: If no cells are given
    """
    grid = [tuple(c) for c in (cells if cells is not None else bench.grid)]
    if not grid:
        raise ConfigError("scaling_run needs at least one (attackers, targets) cell")
    base = base_config(bench, ea)
    seed_list = campaign_seeds(bench, seeds)

    insts = [
        generate_instance(bench.with_size(n, t, seed=bench.seed + k))
        for k, (n, t) in enumerate(grid)
    ]
    plan = [(k, s) for k in range(len(grid)) for s in seed_list]
    logger.info(
        f"Scaling {variant_for_flags(bench)} over {len(grid)} cells x {len(seed_list)} seeds"
    )
    with WorkerPool(workers) as pool:
        results: List[CellResult] = pool.map(
            run_cell, [insts[k] for k, _ in plan], [replace(base, seed=s) for _, s in plan]
        )

    rows = []
    for k, (n, t) in enumerate(grid):
        idx = [j for j, (cell, _) in enumerate(plan) if cell == k]
        scores = score_cells([results[j] for j in idx], seed=bench.seed)
        for j, (hv, igd) in zip(idx, scores):
            r = results[j]
            rows.append(
                {
                    "n": n,
                    "t": t,
                    "seed": plan[j][1],
                    "runtime_ms": r.runtime_ms,
                    "eval_ms": r.eval_ms,
                    "eval_ops": r.eval_ops,
                    "archive_size": r.archive_size,
                    "hv": hv,
                    "igdplus": igd,
                    "timeout": r.timeout,
                }
            )
        if any(results[j].timeout for j in idx):
            logger.warning(f"Cell n={n}, t={t}: some runs hit the time cap")
    return pd.DataFrame(rows, columns=SCALING_COLUMNS)


def population_sweep(
    bench: BenchConfig,
    pop_sizes: Optional[Sequence[int]] = None,
    ea: Optional[EAConfig] = None,
    seeds: Optional[Sequence[int]] = None,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Solve one generated instance at several population sizes.

    Returns:
        DataFrame with POPULATION_COLUMNS, scored against the front pooled over all runs

    Raises:
        ConfigError: If no population sizes are given
    """
    sizes = [int(p) for p in (pop_sizes if pop_sizes is not None else bench.pop_sizes)]
    if not sizes:
        raise ConfigError("population_sweep needs at least one population size")
    inst = generate_instance(bench)
    base = base_config(bench, ea)
    plan = [(p, s) for p in sizes for s in campaign_seeds(bench, seeds)]
    with WorkerPool(workers) as pool:
        results = pool.map(
            run_cell, [inst] * len(plan), [replace(base, pop_size=p, seed=s) for p, s in plan]
        )
    scores = score_cells(results, seed=bench.seed)
    return pd.DataFrame(
        [
            {"pop_size": p, "seed": s, "hv": hv, "igdplus": igd, "runtime_ms": r.runtime_ms}
            for (p, s), r, (hv, igd) in zip(plan, results, scores)
        ],
        columns=POPULATION_COLUMNS,
    )


def linear_fit(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float, float]:
    """
    Least-squares line through (x, y).

    Returns:
        (slope, intercept, r2); r2 is 1.0 when y is constant

    Raises:
        ArgumentError: If fewer than two points are given
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if len(xs) < 2 or len(xs) != len(ys):
        raise ArgumentError("linear_fit needs at least two paired points")
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys - (slope * xs + intercept)
    total = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if total == 0 else 1.0 - float(np.sum(residual**2)) / total
    return float(slope), float(intercept), r2
