"""
Discretization of coverage strategies.

Targets are ranked per attacker by uncovered attacker payoff; an attack set
is always a prefix of that ranking, so a coverage strategy reduces to one
integer per attacker (the I-code). This module computes the rankings, the
genome bounds and the per-attacker ideal solutions.
"""

import logging
from dataclasses import dataclass
from typing import Any, Sequence, Tuple

import numpy as np

from .core import BUDGET_TOL, EPS, GameInstance, best_response
from .errors import ArgumentError, BoundsError, SaturationError

logger = logging.getLogger(__name__)

AttackGroupSkeleton = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True, eq=False)
class TargetOrder:
    """Per attacker, target indices by descending uncovered attacker payoff."""

    ranks: np.ndarray

    def prefix(self, i: int, k: int) -> Tuple[int, ...]:
        return tuple(int(t) for t in self.ranks[i, :k])


@dataclass(frozen=True, eq=False)
class IdealProfile:
    """
    Single-attacker optima used as restoration targets and payoff bounds.

    Attributes:
        ideal_cov: (N, T) coverage spending the whole budget against each attacker alone
        ideal_fitness: (N,) defender payoff of each ideal coverage
        ideal_at: (N,) attacked target under each ideal coverage
        gamma_max: (N,) largest feasible attack-set size per attacker
        ideal_level: (N,) common attacker payoff across the ideal attack set
        anchor_cov: (N, T) indifference coverage of the gamma_max prefix at its anchor
    """

    ideal_cov: np.ndarray
    ideal_fitness: np.ndarray
    ideal_at: np.ndarray
    gamma_max: np.ndarray
    ideal_level: np.ndarray
    anchor_cov: np.ndarray


def target_order(inst: GameInstance) -> TargetOrder:
    """Stable descending sort of each attacker's uncovered payoffs."""
    ranks = np.argsort(-inst.u_unc_att, axis=1, kind="stable")
    ranks.setflags(write=False)
    return TargetOrder(ranks=ranks)


def as_code(code: Any, lower: Any, upper: Any) -> np.ndarray:
    """
    Validate an I-code against per-gene bounds.

    Raises:
        BoundsError: If the length is wrong or a gene lies outside [lower, upper]
    """
    arr = np.asarray(code)
    upper = np.asarray(upper, dtype=int)
    if arr.shape != upper.shape:
        raise BoundsError(f"I-code has shape {arr.shape}, expected {upper.shape}")
    if arr.dtype.kind not in "iu" and not np.all(np.mod(arr, 1) == 0):
        raise BoundsError(f"I-code {arr.tolist()} has non-integer genes")
    arr = arr.astype(int)
    bad = np.flatnonzero((arr < lower) | (arr > upper))
    if len(bad):
        i = int(bad[0])
        raise BoundsError(f"gene {i} = {arr[i]} outside [{lower}, {int(upper[i])}]")
    return arr


def decode(inst: GameInstance, order: TargetOrder, code: Sequence[int]) -> AttackGroupSkeleton:
    """
    Attack-set members for every attacker: the first code[i] targets of its order.

    Raises:
        BoundsError: If a gene lies outside [1, T]
    """
    sizes = as_code(code, 1, np.full(inst.num_attackers, inst.num_targets))
    return tuple(order.prefix(i, int(k)) for i, k in enumerate(sizes))


def level_coverage(
    inst: GameInstance, i: int, members: Sequence[int], level: float
) -> np.ndarray:
    """Coverage that brings attacker i's payoff on every member down to ``level``."""
    cover = np.zeros(inst.num_targets)
    idx = np.asarray(members, dtype=int)
    unc = inst.u_unc_att[i, idx]
    cover[idx] = (level - unc) / (inst.u_cov_att[i, idx] - unc)
    return cover


def indifference_coverage(inst: GameInstance, i: int, gamma: Sequence[int]) -> np.ndarray:
    """
    Anchor-level indifference coverage of a prefix.

    The last member of ``gamma`` keeps zero coverage and fixes the payoff
    level every other member is brought down to.

    Args:
        inst: Game instance
        i: Attacker index
        gamma: Prefix of attacker i's target order

    Returns:
        np.ndarray: Length-T coverage, zero outside gamma

    Raises:
        ArgumentError: If gamma is empty or not ordered by descending payoff
        SaturationError: If a member would need coverage above 1
    """
    if len(gamma) == 0:
        raise ArgumentError("gamma must contain at least one target")
    level = float(inst.u_unc_att[i, gamma[-1]])
    cover = level_coverage(inst, i, gamma, level)
    if np.any(cover < -EPS):
        raise ArgumentError(f"gamma {tuple(gamma)} is not a prefix of attacker {i}'s order")
    over = np.flatnonzero(cover > 1.0 + BUDGET_TOL)
    if len(over):
        raise SaturationError(i, int(over[0]), cover[over[0]])
    return np.clip(cover, 0.0, 1.0)


def _prefix_fits(inst: GameInstance, order: TargetOrder, i: int, k: int) -> bool:
    idx = order.ranks[i, :k]
    cover = level_coverage(inst, i, idx, float(inst.u_unc_att[i, idx[-1]]))
    return cover.sum() <= inst.budget + BUDGET_TOL and cover.max() <= 1.0 + BUDGET_TOL


def max_attack_set_size(inst: GameInstance, order: TargetOrder, i: int) -> int:
    """
    Largest prefix length whose anchor-level coverage fits budget and unit caps.

    Cost and the largest component both grow with the prefix length, so the
    first failing prefix bounds the search.
    """
    lo, hi = 1, inst.num_targets
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _prefix_fits(inst, order, i, mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def full_budget_level(inst: GameInstance, order: TargetOrder, i: int, size: int) -> float:
    """
    Lowest common attacker payoff reachable on the ``size``-prefix.

    Bounded by the budget, by the member that saturates first, and by the
    next target in the order (which would otherwise join the attack set).
    """
    idx = order.ranks[i, :size]
    unc = inst.u_unc_att[i, idx]
    spread = unc - inst.u_cov_att[i, idx]
    by_budget = (np.sum(unc / spread) - inst.budget) / np.sum(1.0 / spread)
    by_caps = float(inst.u_cov_att[i, idx].max())
    by_next = -np.inf
    if size < inst.num_targets:
        by_next = float(inst.u_unc_att[i, order.ranks[i, size]])
    return float(min(max(by_budget, by_caps, by_next), unc[-1]))


def ideal_profile(inst: GameInstance, order: TargetOrder) -> IdealProfile:
    """
    Compute each attacker's ideal solution and genome bound.

    Args:
        inst: Game instance
        order: Target order of ``inst``

    Returns:
        IdealProfile: Shared read-only by evaluation, search and refinement
    """
    n, t = inst.num_attackers, inst.num_targets
    ideal_cov = np.zeros((n, t))
    anchor_cov = np.zeros((n, t))
    ideal_fitness = np.zeros(n)
    ideal_at = np.zeros(n, dtype=int)
    gamma_max = np.zeros(n, dtype=int)
    ideal_level = np.zeros(n)

    for i in range(n):
        size = max_attack_set_size(inst, order, i)
        members = order.ranks[i, :size]
        level = full_budget_level(inst, order, i, size)
        cover = np.clip(level_coverage(inst, i, members, level), 0.0, 1.0)
        _, at, payoff = best_response(inst, i, cover)
        gamma_max[i] = size
        ideal_level[i] = level
        ideal_cov[i] = cover
        ideal_fitness[i] = payoff
        ideal_at[i] = at
        anchor_cov[i] = indifference_coverage(inst, i, members)
        logger.debug(
            f"Attacker {i}: gamma_max={size}, level={level:.6g}, "
            f"ideal payoff={payoff:.6g} at target {at}"
        )

    for arr in (ideal_cov, ideal_fitness, ideal_at, gamma_max, ideal_level, anchor_cov):
        arr.setflags(write=False)
    return IdealProfile(
        ideal_cov=ideal_cov,
        ideal_fitness=ideal_fitness,
        ideal_at=ideal_at,
        gamma_max=gamma_max,
        ideal_level=ideal_level,
        anchor_cov=anchor_cov,
    )


def gene_level(
    inst: GameInstance, order: TargetOrder, ideal: IdealProfile, i: int, k: int
) -> float:
    """Attacker payoff level restored for gene value k."""
    if k >= ideal.gamma_max[i]:
        return float(ideal.ideal_level[i])
    return float(inst.u_unc_att[i, order.ranks[i, k - 1]])


def gene_coverage(
    inst: GameInstance, order: TargetOrder, ideal: IdealProfile, i: int, k: int
) -> np.ndarray:
    """Single-attacker coverage restored for gene value k."""
    members = order.ranks[i, :k]
    level = gene_level(inst, order, ideal, i, k)
    return np.clip(level_coverage(inst, i, members, level), 0.0, 1.0)


def gene_payoffs(
    inst: GameInstance, order: TargetOrder, ideal: IdealProfile, i: int
) -> np.ndarray:
    """Defender payoff against attacker i alone for every gene value 1..gamma_max[i]."""
    return np.array(
        [
            best_response(inst, i, gene_coverage(inst, order, ideal, i, k))[2]
            for k in range(1, int(ideal.gamma_max[i]) + 1)
        ]
    )


def lattice_size(ideal: IdealProfile) -> float:
    """Number of in-bounds I-codes, as a float so large lattices cannot overflow."""
    return float(np.prod(ideal.gamma_max.astype(float)))


def code_lattice(ideal: IdealProfile) -> np.ndarray:
    """Every in-bounds I-code, one per row, in lexicographic order."""
    axes = [np.arange(1, int(g) + 1) for g in ideal.gamma_max]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)
