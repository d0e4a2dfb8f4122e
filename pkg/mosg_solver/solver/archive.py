"""
Non-dominated archive of every feasible solution seen during a run.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Fitness vectors within this distance on every axis count as duplicates.
ARCHIVE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ArchiveEntry:
    """A feasible solution: the genome it came from, its coverage and fitness."""

    code: np.ndarray
    coverage: np.ndarray
    fitness: np.ndarray

    @property
    def resources(self) -> float:
        return float(np.sum(self.coverage))


class FrontArchive:
    """
    Mutually non-dominated entries under maximization.

    An incoming entry is rejected when an existing one weakly dominates it
    within ARCHIVE_TOL; otherwise it evicts every entry it dominates.
    """

    def __init__(self, tol: float = ARCHIVE_TOL):
        self.tol = tol
        self._entries: List[ArchiveEntry] = []
        self._fitness = np.empty((0, 0))

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[ArchiveEntry]:
        return iter(self._entries)

    @property
    def entries(self) -> Tuple[ArchiveEntry, ...]:
        return tuple(self._entries)

    def add(self, entry: ArchiveEntry) -> bool:
        """Insert one entry; returns False when it was dominated or a duplicate."""
        f = np.asarray(entry.fitness, dtype=float)
        if self._entries:
            if np.any(np.all(self._fitness >= f - self.tol, axis=1)):
                return False
            keep = ~np.all(f >= self._fitness - self.tol, axis=1)
            self._entries = [e for e, k in zip(self._entries, keep) if k]
            self._fitness = np.vstack([self._fitness[keep], f])
        else:
            self._fitness = f[None, :].copy()
        self._entries.append(entry)
        return True

    def update(self, entries: Iterable[ArchiveEntry]) -> int:
        """Insert many entries; returns how many were accepted."""
        return sum(1 for e in entries if self.add(e))

    def fitness_matrix(self) -> np.ndarray:
        return self._fitness.copy()

    def sorted_entries(self) -> List[ArchiveEntry]:
        """Entries by fitness, descending lexicographically."""
        if not self._entries:
            return []
        order = np.lexsort(-self._fitness.T[::-1])
        return [self._entries[i] for i in order]

    @classmethod
    def from_entries(
        cls, entries: Iterable[ArchiveEntry], tol: float = ARCHIVE_TOL
    ) -> "FrontArchive":
        archive = cls(tol=tol)
        archive.update(entries)
        return archive
