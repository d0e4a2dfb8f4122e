"""
Reference directions from Riesz s-energy minimization on the unit simplex.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..game.errors import ConfigError

logger = logging.getLogger(__name__)

RIESZ_ITERATIONS = 1000
RIESZ_STEP = 1e-2
RIESZ_DECAY = 0.999


@dataclass(frozen=True, eq=False)
class ReferenceDirections:
    """P points of the unit simplex in N dimensions, one per row."""

    dirs: np.ndarray

    def __len__(self) -> int:
        return int(self.dirs.shape[0])


def project_simplex(points: np.ndarray) -> np.ndarray:
    """Euclidean projection of every row onto the probability simplex."""
    m, n = points.shape
    u = -np.sort(-points, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    rho = np.sum(u - css / np.arange(1, n + 1) > 0, axis=1)
    theta = css[np.arange(m), rho - 1] / rho
    return np.maximum(points - theta[:, None], 0.0)


@lru_cache(maxsize=32)
def _riesz(n_obj: int, n_points: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.dirichlet(np.ones(n_obj), size=n_points)
    s = float(n_obj**2)
    step = RIESZ_STEP
    for _ in range(RIESZ_ITERATIONS):
        sq = np.sum(x * x, axis=1)
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * x @ x.T, 1e-24)
        np.fill_diagonal(d2, np.inf)
        # weights d^-(s+2), rescaled by the closest pair to stay finite
        log_w = -0.5 * (s + 2.0) * np.log(d2)
        w = np.exp(log_w - log_w[np.isfinite(log_w)].max())
        push = x * w.sum(axis=1)[:, None] - w @ x
        norm = np.linalg.norm(push, axis=1).max()
        if norm > 0:
            x = project_simplex(x + step * push / norm)
        step *= RIESZ_DECAY
    # renormalize away rounding drift from the projection
    return x / x.sum(axis=1, keepdims=True)


def riesz_directions(n_obj: int, n_points: int, seed: int = 0) -> ReferenceDirections:
    """
    Spread ``n_points`` directions over the N-simplex by projected gradient descent.

    Args:
        n_obj: Number of objectives N
        n_points: Number of directions P (at least N)
        seed: Seed of the random initialization

    Returns:
        ReferenceDirections: Deterministic for fixed arguments

    Raises:
        ConfigError: If P < N
    """
    if n_obj < 1 or n_points < n_obj:
        raise ConfigError(f"need at least n_obj={n_obj} reference directions, got {n_points}")
    if n_obj == 1:
        return ReferenceDirections(dirs=np.ones((n_points, 1)))
    logger.debug(f"Generating {n_points} Riesz directions in {n_obj} dimensions")
    return ReferenceDirections(dirs=_riesz(int(n_obj), int(n_points), int(seed)).copy())
