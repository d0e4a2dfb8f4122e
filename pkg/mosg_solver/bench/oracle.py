"""
Exhaustive Pareto front of small instances, and an LP check of single-attacker optima.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from ..game.core import GameInstance, pareto_indices
from ..game.discretize import (
    IdealProfile,
    TargetOrder,
    code_lattice,
    ideal_profile,
    lattice_size,
    target_order,
)
from ..game.errors import ArgumentError, OracleGuardError
from ..solver.evaluate import (
    alternatives,
    candidate_values,
    combination_count,
    restore_exhaustive,
)

logger = logging.getLogger(__name__)

MAX_CODES = 100_000
MAX_COMBINATIONS = 1_000_000


@dataclass(frozen=True, eq=False)
class OracleFront:
    """Exact non-dominated fitness set with witnessing I-codes and coverages."""

    fitness: np.ndarray
    codes: np.ndarray
    coverages: np.ndarray

    def __len__(self) -> int:
        return int(self.fitness.shape[0])


def oracle_front(
    inst: GameInstance,
    order: Optional[TargetOrder] = None,
    ideal: Optional[IdealProfile] = None,
    max_codes: int = MAX_CODES,
    max_combinations: int = MAX_COMBINATIONS,
) -> OracleFront:
    """
    Enumerate every in-bounds I-code and every per-target choice among its
    alternatives (zero included), keeping the non-dominated feasible fitness.

    Raises:
        OracleGuardError: If the code count or a code's combination count exceeds its guard
    """
    order = order or target_order(inst)
    ideal = ideal or ideal_profile(inst, order)
    num_codes = lattice_size(ideal)
    codes = code_lattice(ideal) if num_codes <= max_codes else np.empty((0, inst.num_attackers))
    values = [candidate_values(alternatives(inst, order, ideal, c)) for c in codes]
    worst = max((combination_count(vals) for vals in values), default=0.0)
    if num_codes > max_codes or worst > max_combinations:
        logger.warning(
            f"Oracle guard: {num_codes:.0f} codes, up to {worst:.0f} combinations per code"
        )
        raise OracleGuardError(int(num_codes), int(worst))

    fits, covs, code_rows = [], [], []
    for code, vals in zip(codes, values):
        covers, fit = restore_exhaustive(inst, vals)
        if not len(fit):
            continue
        fits.append(fit)
        covs.append(covers)
        code_rows.append(np.repeat(code[None, :], len(fit), axis=0))

    if not fits:
        n, t = inst.num_attackers, inst.num_targets
        return OracleFront(np.empty((0, n)), np.empty((0, n), dtype=int), np.empty((0, t)))
    fit = np.vstack(fits)
    keep = pareto_indices(fit)
    logger.info(f"Oracle: {num_codes:.0f} codes, front of {len(keep)} points")
    return OracleFront(
        fitness=fit[keep], codes=np.vstack(code_rows)[keep], coverages=np.vstack(covs)[keep]
    )


def single_attacker_optimum(inst: GameInstance, i: int) -> float:
    """
    Best defender payoff against attacker i alone, by one LP per attacked target.

    Maximizes the defender payoff at the attacked target subject to it being
    a best response, the budget and unit caps.
    """
    if not 0 <= i < inst.num_attackers:
        raise ArgumentError(f"attacker index {i} out of range [0, {inst.num_attackers})")
    t_count = inst.num_targets
    spread_att = inst.u_cov_att[i] - inst.u_unc_att[i]
    best = -np.inf
    for star in range(t_count):
        a_ub = np.zeros((t_count, t_count))
        b_ub = np.zeros(t_count)
        for t in range(t_count):
            if t == star:
                continue
            a_ub[t, t] = spread_att[t]
            a_ub[t, star] = -spread_att[star]
            b_ub[t] = inst.u_unc_att[i, star] - inst.u_unc_att[i, t]
        a_ub[star] = 1.0
        b_ub[star] = inst.budget
        objective = np.zeros(t_count)
        objective[star] = -(inst.u_cov_def[i, star] - inst.u_unc_def[i, star])
        res = linprog(
            objective, A_ub=a_ub, b_ub=b_ub, bounds=[(0.0, 1.0)] * t_count, method="highs"
        )
        if res.status != 0:
            continue
        c_star = res.x[star]
        payoff = c_star * inst.u_cov_def[i, star] + (1.0 - c_star) * inst.u_unc_def[i, star]
        best = max(best, float(payoff))
    return best
