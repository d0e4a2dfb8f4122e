"""
Security-game model.

Payoff structures, coverage vectors, expected payoffs, attack sets with
strong-Stackelberg tie-breaking, fitness vectors and Pareto dominance.
All functions are pure; a GameInstance never changes after construction.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np

from .errors import (
    ArgumentError,
    InfeasibleCoverageError,
    InstanceValidationError,
    UndefinedGapError,
)

logger = logging.getLogger(__name__)

# Absolute tolerance for attack-set membership and payoff equality.
EPS = 1e-9
# Absolute slack allowed on the L1 budget and on unit coverage caps.
BUDGET_TOL = 1e-9

PAYOFF_FIELDS = ("u_cov_att", "u_unc_att", "u_cov_def", "u_unc_def")


@dataclass(frozen=True, eq=False)
class GameInstance:
    """
    Payoff structure of one defender against N attackers over T targets.

    Payoff arrays have shape (N, T) and are stored read-only.
    """

    num_attackers: int
    num_targets: int
    resource_ratio: float
    u_cov_att: np.ndarray
    u_unc_att: np.ndarray
    u_cov_def: np.ndarray
    u_unc_def: np.ndarray

    def __post_init__(self) -> None:
        for name in PAYOFF_FIELDS:
            try:
                arr = np.array(getattr(self, name), dtype=float)
            except (TypeError, ValueError) as e:
                raise InstanceValidationError(f"{name}: payoffs must be real numbers ({e})")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        self._validate()

    def _validate(self) -> None:
        """Check every invariant and report the first one violated."""
        n, t = self.num_attackers, self.num_targets
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InstanceValidationError(f"n must be a positive integer, got {n!r}")
        if not isinstance(t, (int, np.integer)) or t < 1:
            raise InstanceValidationError(f"t must be a positive integer, got {t!r}")
        r = self.resource_ratio
        if not np.isfinite(r) or not 0.0 < r <= 1.0:
            raise InstanceValidationError(f"r must lie in (0, 1], got {r!r}")
        for name in PAYOFF_FIELDS:
            arr = getattr(self, name)
            if arr.shape != (n, t):
                raise InstanceValidationError(f"{name} has shape {arr.shape}, expected ({n}, {t})")
            if not np.all(np.isfinite(arr)):
                raise InstanceValidationError(f"{name} contains non-finite values")
        bad = np.argwhere(self.u_cov_att >= self.u_unc_att)
        if len(bad):
            i, j = bad[0]
            raise InstanceValidationError(
                f"attacker {i}, target {j}: u_cov_att ({self.u_cov_att[i, j]}) must be "
                f"strictly below u_unc_att ({self.u_unc_att[i, j]})"
            )
        bad = np.argwhere(self.u_cov_def < self.u_unc_def)
        if len(bad):
            i, j = bad[0]
            raise InstanceValidationError(
                f"attacker {i}, target {j}: u_cov_def ({self.u_cov_def[i, j]}) must not be "
                f"below u_unc_def ({self.u_unc_def[i, j]})"
            )

    @property
    def budget(self) -> float:
        """Total defender resources r*T."""
        return float(self.resource_ratio * self.num_targets)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GameInstance":
        """
        Build an instance from the JSON schema
        ``{"n", "t", "r", "attackers": [{"u_cov_att", "u_unc_att", "u_cov_def", "u_unc_def"}]}``.

        Raises:
            InstanceValidationError: If a key is missing or any invariant fails
        """
        for key in ("n", "t", "r", "attackers"):
            if key not in data:
                raise InstanceValidationError(f"missing key '{key}'")
        n, t = data["n"], data["t"]
        attackers = data["attackers"]
        if not isinstance(attackers, list) or len(attackers) != n:
            raise InstanceValidationError(f"'attackers' must list exactly n={n} entries")
        payoffs: Dict[str, List[List[float]]] = {name: [] for name in PAYOFF_FIELDS}
        for i, entry in enumerate(attackers):
            for name in PAYOFF_FIELDS:
                if name not in entry:
                    raise InstanceValidationError(f"attacker {i}: missing key '{name}'")
                if len(entry[name]) != t:
                    raise InstanceValidationError(
                        f"attacker {i}: '{name}' has {len(entry[name])} values, expected t={t}"
                    )
                payoffs[name].append(entry[name])
        return cls(num_attackers=n, num_targets=t, resource_ratio=float(data["r"]), **payoffs)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to the instance JSON schema."""
        attackers = []
        for i in range(self.num_attackers):
            attackers.append(
                {name: [_plain(v) for v in getattr(self, name)[i]] for name in PAYOFF_FIELDS}
            )
        return {
            "n": int(self.num_attackers),
            "t": int(self.num_targets),
            "r": float(self.resource_ratio),
            "attackers": attackers,
        }


def _plain(value: float) -> Any:
    """Integers stay integers in JSON output."""
    return int(value) if float(value).is_integer() else float(value)


@dataclass(frozen=True)
class AttackSet:
    """Targets tying for an attacker's best payoff, and the one it attacks."""

    attacker_id: int
    members: Tuple[int, ...]
    attacked_target: int


@dataclass(frozen=True)
class AttackGroup:
    """One attack set per attacker."""

    sets: Tuple[AttackSet, ...]

    @property
    def attacked_targets(self) -> Tuple[int, ...]:
        return tuple(s.attacked_target for s in self.sets)

    def __len__(self) -> int:
        return len(self.sets)


def _check_attacker(inst: GameInstance, i: int) -> None:
    if not 0 <= i < inst.num_attackers:
        raise ArgumentError(f"attacker index {i} out of range [0, {inst.num_attackers})")


def _check_target(inst: GameInstance, t: int) -> None:
    if not 0 <= t < inst.num_targets:
        raise ArgumentError(f"target index {t} out of range [0, {inst.num_targets})")


def _check_probability(c_t: float) -> None:
    if not -BUDGET_TOL <= c_t <= 1.0 + BUDGET_TOL:
        raise ArgumentError(f"coverage {c_t} outside [0, 1]")


def expected_attacker_payoff(inst: GameInstance, i: int, t: int, c_t: float) -> float:
    """Attacker i's expected payoff for attacking t covered with probability c_t."""
    _check_attacker(inst, i)
    _check_target(inst, t)
    _check_probability(c_t)
    return float(c_t * inst.u_cov_att[i, t] + (1.0 - c_t) * inst.u_unc_att[i, t])


def expected_defender_payoff(inst: GameInstance, i: int, t: int, c_t: float) -> float:
    """Defender's expected payoff against attacker i when t (covered with c_t) is attacked."""
    _check_attacker(inst, i)
    _check_target(inst, t)
    _check_probability(c_t)
    return float(c_t * inst.u_cov_def[i, t] + (1.0 - c_t) * inst.u_unc_def[i, t])


def attacker_payoffs(inst: GameInstance, i: int, cover: np.ndarray) -> np.ndarray:
    """Expected attacker payoffs over all targets."""
    return cover * inst.u_cov_att[i] + (1.0 - cover) * inst.u_unc_att[i]


def defender_payoffs(inst: GameInstance, i: int, cover: np.ndarray) -> np.ndarray:
    """Expected defender payoffs against attacker i over all targets."""
    return cover * inst.u_cov_def[i] + (1.0 - cover) * inst.u_unc_def[i]


def as_coverage(inst: GameInstance, cover: Any) -> np.ndarray:
    """
    Validate shape and unit range of a coverage vector.

    Raises:
        ArgumentError: On wrong length or a component outside [0, 1]
    """
    c = np.asarray(cover, dtype=float)
    if c.shape != (inst.num_targets,):
        raise ArgumentError(f"coverage has shape {c.shape}, expected ({inst.num_targets},)")
    if np.any(c < -BUDGET_TOL) or np.any(c > 1.0 + BUDGET_TOL):
        raise ArgumentError("coverage components must lie in [0, 1]")
    return c


def coverage_violation(inst: GameInstance, cover: np.ndarray) -> float:
    """Budget overrun sum(c) - r*T; non-positive means feasible."""
    return float(np.sum(cover) - inst.budget)


def is_feasible(inst: GameInstance, cover: np.ndarray) -> bool:
    return coverage_violation(inst, cover) <= BUDGET_TOL


def best_response(inst: GameInstance, i: int, cover: np.ndarray) -> Tuple[np.ndarray, int, float]:
    """
    Members of the attack set, SSE attacked target and the defender payoff there.

    Skips input validation; ``cover`` must be a float array of length T.
    """
    ua = attacker_payoffs(inst, i, cover)
    members = np.flatnonzero(ua >= ua.max() - EPS)
    ud = defender_payoffs(inst, i, cover)[members]
    # first member within EPS of the best defender payoff: lowest index wins remaining ties
    pick = int(np.flatnonzero(ud >= ud.max() - EPS)[0])
    return members, int(members[pick]), float(ud[pick])


def attack_set(inst: GameInstance, i: int, cover: Any) -> AttackSet:
    """
    Attacker i's best-response set under coverage ``cover``.

    The attacked target maximizes the defender payoff among members, then
    takes the lowest index.
    """
    _check_attacker(inst, i)
    c = as_coverage(inst, cover)
    members, at, _ = best_response(inst, i, c)
    return AttackSet(attacker_id=i, members=tuple(int(m) for m in members), attacked_target=at)


def attack_group(inst: GameInstance, cover: Any) -> AttackGroup:
    c = as_coverage(inst, cover)
    return AttackGroup(sets=tuple(attack_set(inst, i, c) for i in range(inst.num_attackers)))


def fitness(inst: GameInstance, cover: Any) -> np.ndarray:
    """
    Defender payoff against every attacker under SSE best responses.

    Args:
        inst: Game instance
        cover: Feasible coverage vector

    Returns:
        np.ndarray: Length-N fitness vector (maximized)

    Raises:
        InfeasibleCoverageError: If the coverage spends more than r*T
    """
    c = as_coverage(inst, cover)
    violation = coverage_violation(inst, c)
    if violation > BUDGET_TOL:
        raise InfeasibleCoverageError(violation)
    return np.array([best_response(inst, i, c)[2] for i in range(inst.num_attackers)])


def batch_fitness(inst: GameInstance, covers: np.ndarray) -> np.ndarray:
    """
    Fitness of many coverage vectors at once, without feasibility checks.

    Args:
        inst: Game instance
        covers: Array of shape (M, T)

    Returns:
        np.ndarray: Array of shape (M, N)
    """
    covers = np.atleast_2d(np.asarray(covers, dtype=float))
    out = np.empty((covers.shape[0], inst.num_attackers))
    for i in range(inst.num_attackers):
        ua = covers * inst.u_cov_att[i] + (1.0 - covers) * inst.u_unc_att[i]
        members = ua >= ua.max(axis=1, keepdims=True) - EPS
        ud = covers * inst.u_cov_def[i] + (1.0 - covers) * inst.u_unc_def[i]
        out[:, i] = np.where(members, ud, -np.inf).max(axis=1)
    return out


class Dominance(Enum):
    """Pareto relation of a fitness vector ``a`` to ``b`` under maximization."""

    DOMINATES = "dominates"
    EQUAL = "equal"
    DOMINATED = "dominated"
    INCOMPARABLE = "incomparable"

    @property
    def weak(self) -> bool:
        """True when ``a`` weakly dominates ``b``."""
        return self in (Dominance.DOMINATES, Dominance.EQUAL)


def dominates(a: Any, b: Any, tol: float = 0.0) -> Dominance:
    """
    Compare two fitness vectors (maximization).

    Raises:
        ArgumentError: If the vectors differ in length
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ArgumentError(f"fitness vectors differ in shape: {a.shape} vs {b.shape}")
    diff = a - b
    if np.all(np.abs(diff) <= tol):
        return Dominance.EQUAL
    if np.all(diff >= -tol):
        return Dominance.DOMINATES
    if np.all(diff <= tol):
        return Dominance.DOMINATED
    return Dominance.INCOMPARABLE


def pareto_indices(points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """
    Indices of the mutually non-dominated rows of ``points`` (maximization).

    Rows equal within ``tol`` to an earlier kept row are dropped, so the
    first occurrence in descending lexicographic order survives.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        return np.empty(0, dtype=int)
    order = np.lexsort(-points.T[::-1])
    kept: List[int] = []
    for idx in order:
        if kept and np.any(np.all(points[kept] >= points[idx] - tol, axis=1)):
            continue
        kept.append(int(idx))
    return np.array(sorted(kept), dtype=int)


def payoff_gap(inst: GameInstance, i: int, cover: Any, at_i: int) -> float:
    """
    Defender-payoff margin of the attacked target over the rest of the attack set.

    Args:
        inst: Game instance
        i: Attacker index
        cover: Coverage vector
        at_i: Attacked target, a member of the attack set

    Returns:
        float: max over members minus max over members other than at_i

    Raises:
        UndefinedGapError: If the attack set has fewer than two members
        ArgumentError: If at_i is not a member
    """
    aset = attack_set(inst, i, cover)
    if len(aset.members) < 2:
        raise UndefinedGapError(f"attacker {i}: attack set {aset.members} has a single member")
    if at_i not in aset.members:
        raise ArgumentError(f"target {at_i} is not in attacker {i}'s attack set {aset.members}")
    ud = defender_payoffs(inst, i, as_coverage(inst, cover))
    members = np.array(aset.members)
    rest = members[members != at_i]
    return float(ud[members].max() - ud[rest].max())
