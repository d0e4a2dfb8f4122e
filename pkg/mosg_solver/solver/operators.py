"""
Variation operators: binary tournament, SBX and HUX crossover, polynomial mutation.
"""

import logging
from typing import Tuple

import numpy as np

from .selection import Population

logger = logging.getLogger(__name__)


def binary_tournament(population: Population, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Indices of ``n`` tournament winners.

    Lower front rank wins, then larger niche distance; remaining ties go to
    the first contestant.
    """
    size = len(population)
    a = rng.integers(size, size=n)
    b = rng.integers(size, size=n)
    ranks = np.array([m.rank for m in population])
    dist = np.array([m.niche_distance for m in population])
    b_wins = (ranks[b] < ranks[a]) | ((ranks[b] == ranks[a]) & (dist[b] > dist[a]))
    return np.where(b_wins, b, a)


def simulated_binary_crossover(
    parent_a: np.ndarray,
    parent_b: np.ndarray,
    rng: np.random.Generator,
    prob: float,
    eta: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """SBX on paired rows; a pair is copied unchanged with probability 1 - prob."""
    n_pairs, n_var = parent_a.shape
    mu = rng.random((n_pairs, n_var))
    beta = np.where(
        mu <= 0.5,
        (2.0 * mu) ** (1.0 / (eta + 1.0)),
        (2.0 - 2.0 * mu) ** (-1.0 / (eta + 1.0)),
    )
    beta = beta * (-1.0) ** rng.integers(0, 2, (n_pairs, n_var))
    beta[rng.random((n_pairs, n_var)) < 0.5] = 1.0
    beta[rng.random(n_pairs) >= prob, :] = 1.0
    mean = (parent_a + parent_b) / 2.0
    half = (parent_a - parent_b) / 2.0
    return mean + beta * half, mean - beta * half


def half_uniform_crossover(
    parent_a: np.ndarray,
    parent_b: np.ndarray,
    rng: np.random.Generator,
    prob: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """HUX: swap a random half of the differing genes of each pair."""
    child_a, child_b = parent_a.copy(), parent_b.copy()
    draws = rng.random(len(parent_a))
    for k in range(len(parent_a)):
        diff = np.flatnonzero(parent_a[k] != parent_b[k])
        if draws[k] >= prob or diff.size < 2:
            continue
        swap = rng.permutation(diff)[: diff.size // 2]
        child_a[k, swap] = parent_b[k, swap]
        child_b[k, swap] = parent_a[k, swap]
    return child_a, child_b


def polynomial_mutation(
    genomes: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
    prob: float,
    eta: float,
) -> np.ndarray:
    """Per-gene polynomial mutation within [lower, upper]; fixed genes never move."""
    x = np.clip(np.asarray(genomes, dtype=float), lower, upper)
    span = np.broadcast_to(upper - lower, x.shape).astype(float)
    site = (rng.random(x.shape) < prob) & (span > 0)
    mu = rng.random(x.shape)
    safe = np.where(span > 0, span, 1.0)
    delta1 = (x - lower) / safe
    delta2 = (upper - x) / safe
    power = 1.0 / (eta + 1.0)
    down = (2.0 * mu + (1.0 - 2.0 * mu) * (1.0 - delta1) ** (eta + 1.0)) ** power - 1.0
    up = 1.0 - (2.0 * (1.0 - mu) + 2.0 * (mu - 0.5) * (1.0 - delta2) ** (eta + 1.0)) ** power
    delta = np.where(mu <= 0.5, down, up)
    x = np.where(site, x + delta * span, x)
    return np.clip(x, lower, upper)


def vary(
    population: Population,
    n_offspring: int,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
    crossover: str = "sbx",
    crossover_prob: float = 0.9,
    crossover_eta: float = 15.0,
    mutation_prob: float = 0.1,
    mutation_eta: float = 20.0,
    integer: bool = True,
) -> np.ndarray:
    """
    Produce offspring genomes from tournament-selected parents.

    Args:
        population: Current population with ranks and niche distances
        n_offspring: Number of genomes to return
        lower: Per-gene lower bounds
        upper: Per-gene upper bounds
        rng: Generator shared with the rest of the run
        crossover: "sbx" or "hux"
        crossover_prob: Probability a pair recombines
        crossover_eta: SBX distribution index
        mutation_prob: Per-gene mutation probability
        mutation_eta: Polynomial mutation distribution index
        integer: Round genes to integers after variation

    Returns:
        np.ndarray: (n_offspring, n_var) genomes within bounds
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n_pairs = (n_offspring + 1) // 2
    winners = binary_tournament(population, 2 * n_pairs, rng)
    parents = population.genomes()[winners].astype(float)
    parent_a, parent_b = parents[0::2], parents[1::2]

    if crossover == "hux":
        child_a, child_b = half_uniform_crossover(parent_a, parent_b, rng, crossover_prob)
    else:
        child_a, child_b = simulated_binary_crossover(
            parent_a, parent_b, rng, crossover_prob, crossover_eta
        )
    offspring = np.empty((2 * n_pairs, parents.shape[1]))
    offspring[0::2], offspring[1::2] = child_a, child_b
    offspring = np.clip(offspring[:n_offspring], lower, upper)
    offspring = polynomial_mutation(offspring, lower, upper, rng, mutation_prob, mutation_eta)
    if integer:
        return np.clip(np.rint(offspring), lower, upper).astype(int)
    return offspring
