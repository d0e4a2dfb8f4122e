"""
Benchmark configuration and random instance generation.
"""

import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..game.core import GameInstance
from ..game.discretize import target_order
from ..game.errors import ConfigError
from ..utils.data_loader import load_run_config

logger = logging.getLogger(__name__)

POSITIVE_RANGE = (1, 10)
NEGATIVE_RANGE = (-10, -1)


@dataclass
class BenchConfig:
    """
    One benchmark campaign.

    ``discretization``, ``restoration`` and ``refinement`` select an
    ablation variant; ``solver`` holds EAConfig overrides.
    """

    attackers: int = 3
    targets: int = 25
    resource_ratio: float = 0.2
    seed: int = 0
    time_cap: float = 30.0
    repeats: int = 30
    discretization: bool = True
    restoration: bool = True
    refinement: bool = True
    grid: List[Tuple[int, int]] = field(default_factory=list)
    pop_sizes: List[int] = field(default_factory=list)
    solver: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.grid = [tuple(int(v) for v in cell) for cell in self.grid]  # type: ignore[misc]
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            ConfigError: If sizes are out of range or restoration lacks discretization
        """
        if self.attackers < 1 or self.targets < 1:
            raise ConfigError(
                f"attackers and targets must be positive, got {self.attackers}, {self.targets}"
            )
        if not 0.0 < self.resource_ratio <= 1.0:
            raise ConfigError(f"resource_ratio must lie in (0, 1], got {self.resource_ratio}")
        if self.restoration and not self.discretization:
            raise ConfigError("restoration needs discretization (BitOpt works on I-codes)")
        if self.refinement and not self.discretization:
            raise ConfigError("refinement needs discretization")
        if self.time_cap <= 0 or self.repeats < 1:
            raise ConfigError("time_cap must be positive and repeats at least 1")
        for n, t in self.grid:
            if n < 1 or t < 1:
                raise ConfigError(f"grid cell ({n}, {t}) must have positive sizes")

    def with_size(self, attackers: int, targets: int, seed: Optional[int] = None) -> "BenchConfig":
        data = asdict(self)
        data.update(attackers=attackers, targets=targets)
        if seed is not None:
            data["seed"] = seed
        return BenchConfig(**data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BenchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown benchmark settings: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "BenchConfig":
        """
        Load a run file: the ``bench`` block (plus a sibling ``solver`` block)
        if present, else the whole mapping.
        """
        data = load_run_config(path)
        block = dict(data.get("bench", data))
        if "bench" in data and "solver" in data:
            block.setdefault("solver", data["solver"])
        config = cls.from_dict(block)
        logger.info(f"Loaded benchmark config {path}")
        return config


def generate_instance(config: BenchConfig) -> GameInstance:
    """
    Random instance with integral payoffs.

    Uncovered attacker and covered defender payoffs are drawn from
    {1..10}, covered attacker and uncovered defender payoffs from
    {-10..-1}, so every instance is valid by construction.
    """
    rng = np.random.default_rng(config.seed)
    shape = (config.attackers, config.targets)
    lo, hi = POSITIVE_RANGE
    u_unc_att = rng.integers(lo, hi + 1, size=shape)
    u_cov_def = rng.integers(lo, hi + 1, size=shape)
    lo, hi = NEGATIVE_RANGE
    u_cov_att = rng.integers(lo, hi + 1, size=shape)
    u_unc_def = rng.integers(lo, hi + 1, size=shape)
    return GameInstance(
        num_attackers=config.attackers,
        num_targets=config.targets,
        resource_ratio=config.resource_ratio,
        u_cov_att=u_cov_att,
        u_unc_att=u_unc_att,
        u_cov_def=u_cov_def,
        u_unc_def=u_unc_def,
    )


def shared_threat_instance(config: BenchConfig) -> GameInstance:
    """Random instance whose attackers all share the first attacker's payoffs."""
    base = generate_instance(config)
    return GameInstance(
        num_attackers=base.num_attackers,
        num_targets=base.num_targets,
        resource_ratio=base.resource_ratio,
        u_cov_att=np.repeat(base.u_cov_att[:1], base.num_attackers, axis=0),
        u_unc_att=np.repeat(base.u_unc_att[:1], base.num_attackers, axis=0),
        u_cov_def=base.u_cov_def,
        u_unc_def=base.u_unc_def,
    )


def payoff_table(inst: GameInstance) -> pd.DataFrame:
    """Long-format payoffs, one row per (attacker, target), with the target's rank."""
    ranks = np.argsort(target_order(inst).ranks, axis=1)
    rows = []
    for i in range(inst.num_attackers):
        for t in range(inst.num_targets):
            rows.append(
                {
                    "attacker": i,
                    "target": t,
                    "u_cov_att": inst.u_cov_att[i, t],
                    "u_unc_att": inst.u_unc_att[i, t],
                    "u_cov_def": inst.u_cov_def[i, t],
                    "u_unc_def": inst.u_unc_def[i, t],
                    "rank": int(ranks[i, t]),
                }
            )
    return pd.DataFrame(rows)
