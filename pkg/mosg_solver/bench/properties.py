"""
Randomized property checks of the game model, discretization and evaluation.

Each trial draws a small instance (half of them with attackers sharing
attacker payoffs, so many ideal targets coincide) and runs every check
on it. Results are counted per property; failures keep a short message.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..game.core import (
    EPS,
    GameInstance,
    attack_set,
    attacker_payoffs,
    defender_payoffs,
    expected_attacker_payoff,
    expected_defender_payoff,
    fitness,
    payoff_gap,
)
from ..game.discretize import (
    IdealProfile,
    TargetOrder,
    decode,
    gene_payoffs,
    ideal_profile,
    indifference_coverage,
    level_coverage,
    target_order,
)
from ..game.errors import SaturationError
from ..solver.evaluate import AlternativeSet, EvaluationResult, alternatives, evaluate_code
from .generator import BenchConfig, generate_instance, shared_threat_instance
from .oracle import single_attacker_optimum

logger = logging.getLogger(__name__)

PERTURBATION = 1e-4
# HiGHS solves to about 1e-7 in coverage, payoff slopes are at most 20
LP_TOL = 1e-5
MAX_MESSAGES = 10
PROPERTIES = (
    "monotonicity",
    "attack_set_perturbation",
    "payoff_jump",
    "nested_monotonicity",
    "indifference",
    "decode_injective",
    "upper_bound",
    "ideal_optimality",
    "budget_safety",
    "determinism",
    "consistency",
    "split_convergence",
)


@dataclass
class PropertyCount:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    messages: List[str] = field(default_factory=list)

    def record(self, ok: bool, message: str = "") -> None:
        if ok:
            self.passed += 1
            return
        self.failed += 1
        if len(self.messages) < MAX_MESSAGES:
            self.messages.append(message)


@dataclass
class PropertyReport:
    """Pass, fail and skip counts per property."""

    seed: int
    trials: int
    counts: Dict[str, PropertyCount] = field(
        default_factory=lambda: {name: PropertyCount() for name in PROPERTIES}
    )

    @property
    def failures(self) -> int:
        return sum(c.failed for c in self.counts.values())

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {"property": name, "passed": c.passed, "failed": c.failed, "skipped": c.skipped}
                for name, c in self.counts.items()
            ]
        )

    def summary(self) -> str:
        lines = [f"Property suite: seed={self.seed}, trials={self.trials}"]
        for name, c in self.counts.items():
            lines.append(
                f"  {name:<24} passed={c.passed:<7} failed={c.failed:<5} skipped={c.skipped}"
            )
            lines.extend(f"    ! {m}" for m in c.messages)
        lines.append("OK" if self.ok else f"FAILED: {self.failures} failures")
        return "\n".join(lines)


def _random_instance(rng: np.random.Generator, trial: int) -> GameInstance:
    config = BenchConfig(
        attackers=int(rng.integers(1, 5)),
        targets=int(rng.integers(2, 9)),
        resource_ratio=float(rng.choice([0.2, 0.3, 0.5, 0.8])),
        seed=int(rng.integers(0, 2**31)),
    )
    if trial % 2:
        return shared_threat_instance(config)
    return generate_instance(config)


def _random_feasible(inst: GameInstance, rng: np.random.Generator) -> np.ndarray:
    x = rng.random(inst.num_targets)
    cover = x / x.sum() * inst.budget * rng.uniform(0.1, 1.0)
    return np.minimum(cover, 1.0)


def _check_monotonicity(inst: GameInstance, rng: np.random.Generator, count: PropertyCount) -> None:
    i = int(rng.integers(inst.num_attackers))
    t = int(rng.integers(inst.num_targets))
    lo, hi = np.sort(rng.random(2))
    if hi - lo < 1e-6:
        count.skipped += 1
        return
    ua = expected_attacker_payoff(inst, i, t, lo), expected_attacker_payoff(inst, i, t, hi)
    ud = expected_defender_payoff(inst, i, t, lo), expected_defender_payoff(inst, i, t, hi)
    count.record(
        ua[1] < ua[0] and ud[1] >= ud[0],
        f"attacker {i}, target {t}: payoffs not monotone between {lo:.4f} and {hi:.4f}",
    )


def _perturbation_base(
    inst: GameInstance, order: TargetOrder, ideal: IdealProfile, rng: np.random.Generator
) -> Optional[tuple]:
    """Feasible coverage with attacker i's attack set of size at least 2."""
    candidates = [i for i in range(inst.num_attackers) if ideal.gamma_max[i] >= 2]
    if not candidates:
        return None
    i = int(rng.choice(candidates))
    k = int(rng.integers(2, ideal.gamma_max[i] + 1))
    members = order.ranks[i, :k]
    cover = np.clip(level_coverage(inst, i, members, inst.u_unc_att[i, members[-1]]), 0.0, 1.0)
    # spread some of the remaining budget over non-members
    rest = np.setdiff1d(np.arange(inst.num_targets), members)
    spare = inst.budget - cover.sum()
    if len(rest) and spare > 0:
        extra = rng.random(len(rest))
        cover[rest] = np.minimum(extra / extra.sum() * spare * rng.random(), 1.0)
    return i, cover


def _check_perturbation(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    rng: np.random.Generator,
    set_shift: PropertyCount,
    payoff_shift: PropertyCount,
) -> None:
    base = _perturbation_base(inst, order, ideal, rng)
    if base is None:
        set_shift.skipped += 1
        payoff_shift.skipped += 1
        return
    i, cover = base
    before = attack_set(inst, i, cover)
    if len(before.members) < 2:
        set_shift.skipped += 1
        payoff_shift.skipped += 1
        return
    tp = int(rng.integers(inst.num_targets))
    v = PERTURBATION if rng.random() < 0.5 else -PERTURBATION
    after_cover = cover.copy()
    after_cover[tp] += v
    if not 0.0 <= after_cover[tp] <= 1.0 or after_cover.sum() > inst.budget + EPS:
        set_shift.skipped += 1
        payoff_shift.skipped += 1
        return
    ua = attacker_payoffs(inst, i, cover)
    shift = abs(v) * (inst.u_unc_att[i, tp] - inst.u_cov_att[i, tp])
    if tp not in before.members and ua.max() - ua[tp] <= shift + 2 * EPS:
        # outside target close enough to join: the perturbation is not small
        set_shift.skipped += 1
        payoff_shift.skipped += 1
        return

    after = attack_set(inst, i, after_cover)
    members = set(before.members)
    if tp not in members:
        expected = members
    elif v > 0:
        expected = members - {tp}
    else:
        expected = {tp}
    set_shift.record(
        set(after.members) == expected,
        f"attacker {i}, target {tp}, v={v:+g}: {before.members} -> {after.members}",
    )

    gap = payoff_gap(inst, i, cover, before.attacked_target)
    ud_before = defender_payoffs(inst, i, cover)[before.attacked_target]
    ud_after = defender_payoffs(inst, i, after_cover)[after.attacked_target]
    delta = ud_after - ud_before
    if before.attacked_target in after.members:
        bound = abs(v) * abs(inst.u_cov_def[i, tp] - inst.u_unc_def[i, tp]) + EPS
        if tp != before.attacked_target:
            bound = EPS
        payoff_shift.record(
            abs(delta) <= bound, f"attacker {i}: survived but payoff moved {delta:+.3g}"
        )
    else:
        payoff_shift.record(
            -delta >= gap - EPS,
            f"attacker {i}: lost attacked target, drop {-delta:.3g} < gap {gap:.3g}",
        )


def _check_discretization(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    rng: np.random.Generator,
    report: PropertyReport,
) -> None:
    nested = report.counts["nested_monotonicity"]
    indiff = report.counts["indifference"]
    for i in range(inst.num_attackers):
        payoffs = gene_payoffs(inst, order, ideal, i)
        nested.record(
            bool(np.all(np.diff(payoffs) >= -EPS)),
            f"attacker {i}: gene payoffs {np.round(payoffs, 6).tolist()} not nondecreasing",
        )
        k = int(rng.integers(1, ideal.gamma_max[i] + 1))
        members = order.ranks[i, :k]
        try:
            cover = indifference_coverage(inst, i, members)
        except SaturationError:
            indiff.skipped += 1
            continue
        ua = attacker_payoffs(inst, i, cover)[members]
        indiff.record(bool(np.ptp(ua) <= EPS * 10), f"attacker {i}, k={k}: spread {np.ptp(ua):.3g}")

    codes = {tuple(int(rng.integers(1, g + 1)) for g in ideal.gamma_max) for _ in range(6)}
    skeletons = {decode(inst, order, c) for c in codes}
    report.counts["decode_injective"].record(
        len(skeletons) == len(codes), f"{len(codes)} codes decoded to {len(skeletons)} skeletons"
    )


def _satisfies_consistency(
    inst: GameInstance, ideal: IdealProfile, alts: AlternativeSet, result: EvaluationResult
) -> bool:
    if result.divergence != 0:
        return False
    for i in range(inst.num_attackers):
        t = int(ideal.ideal_at[i])
        own = alts.own_value(t, i)
        if result.coverage[t] < (own or 0.0) - EPS:
            return False
    return True


def _satisfies_split(
    inst: GameInstance, ideal: IdealProfile, alts: AlternativeSet, result: EvaluationResult
) -> bool:
    for i in range(inst.num_attackers):
        t = int(ideal.ideal_at[i])
        # ideal target tied in from just past the prefix must stay uncovered
        if alts.own_value(t, i) is None and result.coverage[t] > EPS:
            return False
    for t, opts in enumerate(alts.options):
        if not opts:
            continue
        chosen = result.coverage[t]
        if chosen < opts[-1].value - EPS:
            return False
        for opt in opts:
            for i in opt.attackers:
                if ideal.ideal_at[i] == t and abs(opt.value - chosen) > EPS:
                    return False
    return True


def _check_evaluation(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    rng: np.random.Generator,
    report: PropertyReport,
) -> None:
    upper = report.counts["upper_bound"]
    budget = report.counts["budget_safety"]
    bound = ideal.ideal_fitness + EPS

    for _ in range(10):
        fit = fitness(inst, _random_feasible(inst, rng))
        upper.record(bool(np.all(fit <= bound)), f"random coverage beats ideal: {fit.tolist()}")

    codes = [np.asarray(ideal.gamma_max)]
    codes += [
        np.array([int(rng.integers(1, g + 1)) for g in ideal.gamma_max]) for _ in range(5)
    ]
    for code in codes:
        result = evaluate_code(inst, order, ideal, code)
        if not result.feasible:
            budget.skipped += 1
            continue
        assert result.fitness is not None
        upper.record(
            bool(np.all(result.fitness <= bound)), f"code {code.tolist()} beats ideal"
        )
        budget.record(
            result.coverage.sum() <= inst.budget + EPS
            and bool(np.all((result.coverage >= 0) & (result.coverage <= 1))),
            f"code {code.tolist()} breaks the budget or unit range",
        )

    code = codes[0]
    first = evaluate_code(inst, order, ideal, code)
    second = evaluate_code(inst, order, ideal, code)
    report.counts["determinism"].record(
        np.array_equal(first.coverage, second.coverage) and first.steps == second.steps,
        f"code {code.tolist()} evaluated twice with different results",
    )

    alts = alternatives(inst, order, ideal, code)
    consistency = report.counts["consistency"]
    split = report.counts["split_convergence"]
    if not first.feasible:
        consistency.skipped += 1
        split.skipped += 1
        return
    assert first.fitness is not None
    at_ideal = bool(np.all(np.abs(first.fitness - ideal.ideal_fitness) <= EPS))
    if _satisfies_consistency(inst, ideal, alts, first):
        consistency.record(
            at_ideal, f"divergence 0 but fitness {first.fitness.tolist()} below ideal"
        )
    else:
        consistency.skipped += 1
    if _satisfies_split(inst, ideal, alts, first):
        split.record(
            at_ideal, f"split condition holds but fitness {first.fitness.tolist()} below ideal"
        )
    else:
        split.skipped += 1


def _check_ideal_optimality(inst: GameInstance, ideal: IdealProfile, count: PropertyCount) -> None:
    for i in range(inst.num_attackers):
        best = single_attacker_optimum(inst, i)
        count.record(
            abs(best - ideal.ideal_fitness[i]) <= LP_TOL,
            f"attacker {i}: ideal {ideal.ideal_fitness[i]:.9g}, LP optimum {best:.9g}",
        )


def property_suite(
    seed: int = 0, trials: int = 1000, show_progress: bool = False
) -> PropertyReport:
    """
    Run every property check on ``trials`` random instances.

    Args:
        seed: Master seed; the report is deterministic per seed
        trials: Number of random instances
        show_progress: Show a progress bar

    Returns:
        PropertyReport: Counts per property; failures are content, not exceptions
    """
    rng = np.random.default_rng(seed)
    report = PropertyReport(seed=seed, trials=trials)
    for trial in tqdm(range(trials), desc="Property trials", disable=not show_progress):
        inst = _random_instance(rng, trial)
        order = target_order(inst)
        ideal = ideal_profile(inst, order)
        _check_monotonicity(inst, rng, report.counts["monotonicity"])
        _check_perturbation(
            inst,
            order,
            ideal,
            rng,
            report.counts["attack_set_perturbation"],
            report.counts["payoff_jump"],
        )
        _check_discretization(inst, order, ideal, rng, report)
        _check_evaluation(inst, order, ideal, rng, report)
        _check_ideal_optimality(inst, ideal, report.counts["ideal_optimality"])
    logger.info(f"Property suite finished: {report.failures} failures over {trials} trials")
    return report
