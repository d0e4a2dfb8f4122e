"""
Survivor selection: feasibility-first non-dominated sorting with
reference-direction niching.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .directions import ReferenceDirections
from .evaluate import EvaluationResult

logger = logging.getLogger(__name__)


@dataclass
class Individual:
    """A genome, its evaluation and the ranking survive() assigned it."""

    genome: np.ndarray
    result: EvaluationResult
    rank: int = 0
    niche_distance: float = np.inf

    @property
    def feasible(self) -> bool:
        return self.result.feasible


@dataclass
class Population:
    members: List[Individual] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Individual]:
        return iter(self.members)

    def genomes(self) -> np.ndarray:
        return np.array([m.genome for m in self.members])


def nondominated_sort(
    fitnesses: np.ndarray, violations: Optional[np.ndarray] = None
) -> List[List[int]]:
    """
    Partition rows into fronts under maximization.

    Rows with a positive violation are infeasible; they follow every
    feasible front, grouped by equal violation in ascending order.

    Args:
        fitnesses: (M, N) fitness rows; ignored for infeasible rows
        violations: (M,) non-negative budget overruns, zero when feasible

    Returns:
        List[List[int]]: Fronts of row indices, best first
    """
    fitnesses = np.atleast_2d(np.asarray(fitnesses, dtype=float))
    m = fitnesses.shape[0]
    if violations is None:
        violations = np.zeros(m)
    violations = np.asarray(violations, dtype=float)
    feas = np.flatnonzero(violations <= 0)
    fronts: List[List[int]] = []

    if feas.size:
        f = fitnesses[feas]
        # dom[p, q]: p dominates q
        dom = np.all(f[:, None, :] >= f[None, :, :], axis=2) & np.any(
            f[:, None, :] > f[None, :, :], axis=2
        )
        count = dom.sum(axis=0)
        current = np.flatnonzero(count == 0)
        while current.size:
            fronts.append(feas[current].tolist())
            count = count - dom[current].sum(axis=0)
            count[current] = -1
            current = np.flatnonzero(count == 0)

    infeas = np.flatnonzero(violations > 0)
    for level in np.unique(violations[infeas]):
        fronts.append(infeas[violations[infeas] == level].tolist())
    return fronts


def normalize(objs: np.ndarray) -> np.ndarray:
    """
    Translate minimization objectives to the ideal point and scale by the
    hyperplane intercepts through the extreme points.
    """
    n_obj = objs.shape[1]
    shifted = objs - objs.min(axis=0)
    w = 1e-6 + np.eye(n_obj)
    extreme = np.array([np.argmin(np.max(shifted / w[k], axis=1)) for k in range(n_obj)])
    try:
        hyperplane = np.linalg.solve(shifted[extreme], np.ones(n_obj))
        if np.any(hyperplane <= 0) or not np.all(np.isfinite(hyperplane)):
            raise np.linalg.LinAlgError("degenerate hyperplane")
        intercepts = 1.0 / hyperplane
    except np.linalg.LinAlgError:
        intercepts = shifted.max(axis=0)
    intercepts = np.where(intercepts < 1e-12, 1.0, intercepts)
    return shifted / intercepts


def associate(points: np.ndarray, dirs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Closest reference line of every point and the perpendicular distance to it."""
    unit = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    proj = points @ unit.T
    sq = np.sum(points**2, axis=1, keepdims=True)
    dist = np.sqrt(np.maximum(sq - proj**2, 0.0))
    nearest = np.argmin(dist, axis=1)
    return nearest, dist[np.arange(len(points)), nearest]


def _niche(
    nearest: np.ndarray,
    dist: np.ndarray,
    n_selected: int,
    n_dirs: int,
    k: int,
    rng: np.random.Generator,
) -> List[int]:
    """Pick k of the trailing candidates (positions >= n_selected) by niche counts."""
    rho = np.bincount(nearest[:n_selected], minlength=n_dirs).astype(float)
    remaining = list(range(n_selected, len(nearest)))
    active = np.ones(n_dirs, dtype=bool)
    chosen: List[int] = []
    while len(chosen) < k:
        open_dirs = np.flatnonzero(active)
        ties = open_dirs[rho[open_dirs] == rho[open_dirs].min()]
        j = int(ties[rng.integers(len(ties))]) if len(ties) > 1 else int(ties[0])
        members = [c for c in remaining if nearest[c] == j]
        if not members:
            active[j] = False
            continue
        if rho[j] == 0:
            pick = min(members, key=lambda c: dist[c])
        else:
            pick = members[int(rng.integers(len(members)))]
        chosen.append(pick)
        remaining.remove(pick)
        rho[j] += 1
    return chosen


def survive(
    individuals: List[Individual],
    dirs: ReferenceDirections,
    pop_size: int,
    rng: np.random.Generator,
) -> Population:
    """
    Keep ``pop_size`` individuals.

    Whole fronts are taken while they fit; a feasible front that overflows
    is thinned by niching over the reference directions, an infeasible one
    by a random draw. Every survivor carries its front rank and, when
    feasible, its distance to its reference line for tournament selection.

    Args:
        individuals: Parents and offspring
        dirs: Reference directions, one per population slot
        pop_size: Number of survivors
        rng: Generator shared with the rest of the run

    Returns:
        Population: The survivors
    """
    n_obj = dirs.dirs.shape[1]
    fit = np.full((len(individuals), n_obj), np.nan)
    viol = np.zeros(len(individuals))
    for idx, ind in enumerate(individuals):
        if ind.feasible:
            fit[idx] = ind.result.fitness
        else:
            viol[idx] = max(ind.result.violation, 1e-300)
    fronts = nondominated_sort(fit, viol)

    selected: List[int] = []
    overflow: List[int] = []
    for rank, front in enumerate(fronts):
        for idx in front:
            individuals[idx].rank = rank
        if len(selected) + len(front) <= pop_size:
            selected.extend(front)
            if len(selected) == pop_size:
                break
        else:
            overflow = front
            break
    needed = pop_size - len(selected)

    if overflow and not individuals[overflow[0]].feasible:
        selected.extend(int(i) for i in rng.permutation(overflow)[:needed])
        overflow = []

    feasible_kept = [i for i in selected if individuals[i].feasible]
    pool = feasible_kept + overflow
    for idx in selected:
        individuals[idx].niche_distance = np.inf
    if pool:
        norm = normalize(-fit[pool])
        nearest, dist = associate(norm, dirs.dirs)
        for pos, idx in enumerate(pool):
            individuals[idx].niche_distance = float(dist[pos])
        if overflow:
            picks = _niche(nearest, dist, len(feasible_kept), len(dirs), needed, rng)
            selected.extend(pool[p] for p in picks)

    return Population(members=[individuals[i] for i in selected])
