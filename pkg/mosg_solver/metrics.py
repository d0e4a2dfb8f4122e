"""
Front quality indicators.

Hypervolume and IGD+ work in minimization orientation. Solver fronts
maximize defender payoffs, so pass ``maximize=True`` (or negate) at the
boundary; ``build_reference`` does the flip itself.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Tuple

import numpy as np

from .game.core import pareto_indices
from .game.errors import ArgumentError

logger = logging.getLogger(__name__)

# Largest objective count scored exactly; above it Monte-Carlo is used.
HV_EXACT_MAX_DIM = 8
HV_SAMPLES = 1_000_000
_MC_CHUNK = 20_000


@dataclass(frozen=True, eq=False)
class ReferenceFront:
    """Best-known front Z and HV reference point, both in minimization orientation."""

    points: np.ndarray
    ref_point: np.ndarray


def _as_points(front: Any, maximize: bool) -> np.ndarray:
    pts = np.asarray(front, dtype=float)
    if pts.size == 0:
        return np.empty((0, pts.shape[-1] if pts.ndim > 1 else 0))
    pts = np.atleast_2d(pts)
    return -pts if maximize else pts


def nondominated_min(points: np.ndarray) -> np.ndarray:
    """Non-dominated rows under minimization, duplicates removed."""
    if len(points) == 0:
        return points
    return points[pareto_indices(-points)]


def _sweep_2d(points: np.ndarray, ref: np.ndarray) -> float:
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    area, best_y = 0.0, ref[1]
    for x, y in pts:
        if y < best_y:
            area += (ref[0] - x) * (best_y - y)
            best_y = y
    return float(area)


def _wfg(points: np.ndarray, ref: np.ndarray) -> float:
    """Exclusive-volume recursion; ``points`` dominate ``ref`` and are non-dominated."""
    n, dim = points.shape
    if n == 0:
        return 0.0
    if dim == 1:
        return float(ref[0] - points[:, 0].min())
    if dim == 2:
        return _sweep_2d(points, ref)
    if n == 1:
        return float(np.prod(ref - points[0]))
    points = points[np.argsort(points[:, 0], kind="stable")]
    volume = 0.0
    for k in range(n):
        p = points[k]
        volume += float(np.prod(ref - p))
        rest = points[k + 1 :]
        if len(rest):
            limited = nondominated_min(np.maximum(rest, p))
            volume -= _wfg(limited, ref)
    return volume


def hypervolume_estimate(
    front: np.ndarray, ref_point: np.ndarray, samples: int = HV_SAMPLES, seed: int = 0
) -> Tuple[float, float]:
    """
    Monte-Carlo hypervolume over the box spanned by the front's minimum and the reference.

    Returns:
        Tuple[float, float]: Estimate and its standard error
    """
    lower = front.min(axis=0)
    box = float(np.prod(ref_point - lower))
    if box <= 0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        size = min(_MC_CHUNK, samples - done)
        draws = rng.uniform(lower, ref_point, size=(size, len(ref_point)))
        covered = np.zeros(size, dtype=bool)
        for p in front:
            covered |= np.all(draws >= p, axis=1)
        hits += int(covered.sum())
        done += size
    frac = hits / samples
    return box * frac, box * float(np.sqrt(frac * (1.0 - frac) / samples))


def hypervolume(
    front: Any,
    ref_point: Any,
    maximize: bool = False,
    samples: int = HV_SAMPLES,
    seed: int = 0,
) -> float:
    """
    Dominated hypervolume of a front relative to a reference point.

    Exact for up to HV_EXACT_MAX_DIM objectives, a seeded Monte-Carlo
    estimate beyond. Points that do not weakly dominate the reference are
    dropped with a warning.

    Args:
        front: (K, N) objective vectors
        ref_point: Length-N reference point
        maximize: Treat both inputs as maximization data
        samples: Monte-Carlo sample count for large N
        seed: Monte-Carlo seed

    Returns:
        float: Non-negative hypervolume
    """
    pts = _as_points(front, maximize)
    ref = np.asarray(ref_point, dtype=float)
    if maximize:
        ref = -ref
    if len(pts) == 0:
        return 0.0
    if pts.shape[1] != ref.shape[0]:
        raise ArgumentError(f"front has {pts.shape[1]} objectives, reference has {ref.shape[0]}")
    inside = np.all(pts <= ref, axis=1)
    if not np.all(inside):
        logger.warning(f"Dropped {int((~inside).sum())} points not dominating the reference point")
        pts = pts[inside]
    pts = pts[np.all(pts < ref, axis=1)]
    if len(pts) == 0:
        return 0.0
    pts = nondominated_min(pts)
    if pts.shape[1] <= HV_EXACT_MAX_DIM:
        return _wfg(pts, ref)
    value, stderr = hypervolume_estimate(pts, ref, samples=samples, seed=seed)
    logger.debug(f"Monte-Carlo hypervolume {value:.6g} +/- {stderr:.3g} ({samples} samples)")
    return value


def igd_plus(front: Any, reference: Any, maximize: bool = False) -> float:
    """
    IGD+ of a front against reference points Z: (1/|Z|) * sqrt(sum of squared d+).

    d+ of a reference point is the distance to the nearest front point,
    counting only coordinates where the front point is worse.

    Raises:
        ArgumentError: If either set is empty or dimensions differ
    """
    pts = _as_points(front, maximize)
    z = _as_points(reference, maximize)
    if len(pts) == 0 or len(z) == 0:
        raise ArgumentError("igd_plus needs a nonempty front and reference set")
    if pts.shape[1] != z.shape[1]:
        raise ArgumentError(f"front has {pts.shape[1]} objectives, reference has {z.shape[1]}")
    worse = np.maximum(pts[None, :, :] - z[:, None, :], 0.0)
    d_plus = np.sqrt(np.sum(worse**2, axis=2)).min(axis=1)
    return float(np.sqrt(np.sum(d_plus**2)) / len(z))


def build_reference(fronts: Iterable[Any], maximize: bool = True) -> ReferenceFront:
    """
    Pool fronts into a best-known front with a reference point one unit past the worst.

    Args:
        fronts: Fitness sets, maximization by default
        maximize: Orientation of the input fronts

    Returns:
        ReferenceFront: In minimization orientation

    Raises:
        ArgumentError: If the union is empty
    """
    parts = [_as_points(f, maximize) for f in fronts]
    parts = [p for p in parts if len(p)]
    if not parts:
        raise ArgumentError("build_reference needs at least one nonempty front")
    union = np.vstack(parts)
    points = nondominated_min(union)
    return ReferenceFront(points=points, ref_point=union.max(axis=0) + 1.0)


def score_front(
    fitness: Any, reference: ReferenceFront, maximize: bool = True, seed: int = 0
) -> Tuple[float, float]:
    """Hypervolume and IGD+ of a solver front against a reference front."""
    pts = _as_points(fitness, maximize)
    if len(pts) == 0:
        return 0.0, float("nan")
    return (
        hypervolume(pts, reference.ref_point, seed=seed),
        igd_plus(pts, reference.points),
    )


def fixed_reference_point(worst: np.ndarray, offset: float = 1.0) -> np.ndarray:
    """Minimization reference point from per-objective worst maximization values."""
    return -np.asarray(worst, dtype=float) + offset
