"""
I-code evaluation, evolutionary search and archive refinement.
"""

from .archive import ArchiveEntry, FrontArchive
from .directions import ReferenceDirections, riesz_directions
from .evaluate import (
    AlternativeSet,
    EvaluationResult,
    alternatives,
    bitopt,
    boolean_score,
    divergence_group,
    divergence_single,
    evaluate_code,
    restore_exhaustive,
)
from .moea import EAConfig, SolveResult, run, solve
from .refine import min_cov, polish_code, refine_archive
from .selection import Individual, Population, nondominated_sort, survive

__all__ = [
    "AlternativeSet",
    "ArchiveEntry",
    "EAConfig",
    "EvaluationResult",
    "FrontArchive",
    "Individual",
    "Population",
    "ReferenceDirections",
    "SolveResult",
    "alternatives",
    "bitopt",
    "boolean_score",
    "divergence_group",
    "divergence_single",
    "evaluate_code",
    "min_cov",
    "nondominated_sort",
    "polish_code",
    "refine_archive",
    "restore_exhaustive",
    "riesz_directions",
    "run",
    "solve",
    "survive",
]
