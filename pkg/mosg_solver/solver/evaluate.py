"""
I-code evaluation.

An I-code fixes every attacker's attack-set size. Each attacker then proposes
one coverage value (an alternative) per target of its attack set; BitOpt
walks the targets once, picks one alternative per target by scoring how well
the induced attacked targets match the ideal ones, and stops as soon as the
budget is exceeded. ``restore_exhaustive`` instead tries every per-target
choice, which is only affordable for codes with few alternatives.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..game.core import (
    BUDGET_TOL,
    EPS,
    GameInstance,
    attack_group,
    batch_fitness,
    fitness,
    pareto_indices,
)
from ..game.discretize import IdealProfile, TargetOrder, as_code, gene_level
from ..game.errors import ArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Option:
    """One candidate coverage value for a target and the attackers proposing it."""

    value: float
    attackers: Tuple[int, ...]


@dataclass
class AlternativeSet:
    """
    Per-target candidate coverages of a decoded I-code.

    Attributes:
        options: Per target, merged options sorted by ascending value
        attraction: Per target, attackers whose attack set contains it
        counts: Per target, number of attracted attackers
        excluded: (attacker, target) pairs whose value exceeded 1
        work: Number of (attacker, target) alternatives generated
    """

    options: List[List[Option]]
    attraction: List[List[int]]
    counts: np.ndarray
    excluded: List[Tuple[int, int]] = field(default_factory=list)
    work: int = 0

    def own_value(self, t: int, i: int) -> Optional[float]:
        """Value of the option attacker i proposed for target t, if any."""
        for opt in self.options[t]:
            if i in opt.attackers:
                return opt.value
        return None


@dataclass(frozen=True, eq=False)
class EvaluationResult:
    """
    Outcome of restoring an I-code to a coverage vector.

    ``fitness``, ``attacked`` and ``divergence`` are None when infeasible;
    ``coverage`` then holds the partial assignment and ``violation`` the
    overrun at the moment the budget broke.
    """

    coverage: np.ndarray
    fitness: Optional[np.ndarray]
    feasible: bool
    divergence: Optional[int]
    attacked: Optional[Tuple[int, ...]]
    violation: float
    steps: int
    ops: int


def divergence_single(at_a: int, at_b: int) -> int:
    """Discrete metric on attacked targets."""
    return 0 if at_a == at_b else 1


def divergence_group(at_a: Sequence[int], at_b: Sequence[int]) -> int:
    """
    Number of attackers whose attacked target differs.

    Raises:
        ArgumentError: If the vectors differ in length
    """
    if len(at_a) != len(at_b):
        raise ArgumentError(
            f"attacked-target vectors differ in length: {len(at_a)} vs {len(at_b)}"
        )
    return sum(divergence_single(int(a), int(b)) for a, b in zip(at_a, at_b))


def alternatives(
    inst: GameInstance, order: TargetOrder, ideal: IdealProfile, code: Sequence[int]
) -> AlternativeSet:
    """
    Candidate coverages per target for an in-bounds I-code.

    Attacker i proposes, for every target of its prefix, the coverage that
    brings its payoff there down to its gene level. Values within EPS merge
    into one option.

    Raises:
        BoundsError: If a gene lies outside [1, gamma_max]
    """
    sizes = as_code(code, 1, ideal.gamma_max)
    t_count = inst.num_targets
    raw: List[List[Tuple[float, int]]] = [[] for _ in range(t_count)]
    attraction: List[List[int]] = [[] for _ in range(t_count)]
    excluded: List[Tuple[int, int]] = []
    work = 0

    for i, k in enumerate(sizes):
        level = gene_level(inst, order, ideal, i, int(k))
        members = order.ranks[i, :k]
        unc = inst.u_unc_att[i, members]
        values = (level - unc) / (inst.u_cov_att[i, members] - unc)
        work += int(k)
        for t, v in zip(members, values):
            t = int(t)
            attraction[t].append(i)
            if v > 1.0 + BUDGET_TOL:
                excluded.append((i, t))
                continue
            raw[t].append((min(max(float(v), 0.0), 1.0), i))

    options: List[List[Option]] = []
    for entries in raw:
        entries.sort()
        merged: List[Option] = []
        for value, i in entries:
            if merged and value - merged[-1].value <= EPS:
                merged[-1] = Option(merged[-1].value, merged[-1].attackers + (i,))
            else:
                merged.append(Option(value, (i,)))
        options.append(merged)

    if excluded:
        logger.debug(f"Excluded {len(excluded)} saturated alternatives for code {sizes.tolist()}")
    counts = np.array([len(a) for a in attraction], dtype=int)
    return AlternativeSet(
        options=options, attraction=attraction, counts=counts, excluded=excluded, work=work
    )


def boolean_score(options: List[Option], t: int, ideal_at: np.ndarray) -> int:
    """
    Index of the option minimizing the mismatch between ideal and induced targets.

    Choosing option j keeps t in the attack set of attackers proposing
    option j or a larger one and drops it for the rest. The score counts
    attackers whose ideal attacked target is t but lose it, plus attackers
    whose ideal target is elsewhere but keep it. Ties go to the smaller value.
    """
    wants = [sum(1 for i in opt.attackers if ideal_at[i] == t) for opt in options]
    sizes = [len(opt.attackers) for opt in options]
    # split before the first option: every listed attacker keeps t
    score = sum(sizes) - sum(wants)
    best, best_score = 0, score
    for j in range(1, len(options)):
        # option j-1 now drops t: its wanting attackers mismatch, the others match
        score += wants[j - 1] - (sizes[j - 1] - wants[j - 1])
        if score < best_score:
            best, best_score = j, score
    return best


def _assemble(
    inst: GameInstance,
    ideal: IdealProfile,
    alts: AlternativeSet,
    choose: Callable[[List[Option], int], int],
) -> EvaluationResult:
    cover = np.zeros(inst.num_targets)
    spent = 0.0
    ops = alts.work
    for t, opts in enumerate(alts.options):
        if opts:
            j = choose(opts, t) if len(opts) > 1 else 0
            cover[t] = opts[j].value
            ops += len(opts)
        spent += cover[t]
        if spent > inst.budget + BUDGET_TOL:
            return EvaluationResult(
                coverage=cover,
                fitness=None,
                feasible=False,
                divergence=None,
                attacked=None,
                violation=spent - inst.budget,
                steps=t + 1,
                ops=ops,
            )
    attacked = attack_group(inst, cover).attacked_targets
    return EvaluationResult(
        coverage=cover,
        fitness=fitness(inst, cover),
        feasible=True,
        divergence=divergence_group(attacked, ideal.ideal_at),
        attacked=attacked,
        violation=spent - inst.budget,
        steps=inst.num_targets,
        ops=ops,
    )


def bitopt(
    inst: GameInstance, order: TargetOrder, code: Sequence[int], ideal: IdealProfile
) -> EvaluationResult:
    """
    Greedy per-target restoration of an I-code.

    Args:
        inst: Game instance
        order: Target order
        code: In-bounds I-code
        ideal: Ideal profile of ``inst``

    Returns:
        EvaluationResult: Infeasible results are returned, not raised
    """
    alts = alternatives(inst, order, ideal, code)
    return _assemble(inst, ideal, alts, lambda opts, t: boolean_score(opts, t, ideal.ideal_at))


def evaluate_code(
    inst: GameInstance, order: TargetOrder, ideal: IdealProfile, code: Sequence[int]
) -> EvaluationResult:
    """Restore an I-code with BitOpt and score it."""
    return bitopt(inst, order, code, ideal)


def restore_random(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    code: Sequence[int],
    seed: int,
) -> EvaluationResult:
    """Restore an I-code by picking a uniformly random option per target."""
    rng = np.random.default_rng(seed)
    alts = alternatives(inst, order, ideal, code)
    return _assemble(inst, ideal, alts, lambda opts, t: int(rng.integers(len(opts))))


def candidate_values(alts: AlternativeSet) -> List[np.ndarray]:
    """Per target, the distinct coverages an exhaustive restoration tries, zero included."""
    return [np.unique([0.0] + [opt.value for opt in opts]) for opts in alts.options]


def combination_count(values: Sequence[np.ndarray]) -> float:
    """Size of the Cartesian product of ``values``, as a float."""
    return float(np.prod([float(len(v)) for v in values]))


def restore_exhaustive(
    inst: GameInstance, values: Sequence[np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Try every per-target choice among ``values`` and keep the best feasible ones.

    Callers bound ``combination_count(values)`` first; the product is
    materialized in memory.

    Args:
        inst: Game instance
        values: Output of ``candidate_values``

    Returns:
        Tuple of (coverages, fitness): the non-dominated feasible rows,
        both with zero rows when nothing fits the budget
    """
    grids = np.meshgrid(*values, indexing="ij")
    covers = np.stack([g.ravel() for g in grids], axis=1)
    covers = covers[covers.sum(axis=1) <= inst.budget + BUDGET_TOL]
    if not len(covers):
        return covers, np.empty((0, inst.num_attackers))
    fit = batch_fitness(inst, covers)
    keep = pareto_indices(fit)
    return covers[keep], fit[keep]


def evaluate_coverage(
    inst: GameInstance, ideal: IdealProfile, genome: Sequence[float]
) -> EvaluationResult:
    """
    Score a raw coverage genome after clipping to [0, 1] and scaling into the budget.

    Used by the continuous-coverage search, which has no discretization step.
    """
    cover = np.clip(np.asarray(genome, dtype=float), 0.0, 1.0)
    total = cover.sum()
    if total > inst.budget:
        cover = cover * (inst.budget / total)
    attacked = attack_group(inst, cover).attacked_targets
    return EvaluationResult(
        coverage=cover,
        fitness=fitness(inst, cover),
        feasible=True,
        divergence=divergence_group(attacked, ideal.ideal_at),
        attacked=attacked,
        violation=float(cover.sum() - inst.budget),
        steps=inst.num_targets,
        ops=inst.num_targets,
    )
