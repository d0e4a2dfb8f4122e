"""
Post-search refinement of archive entries.

Codes with few alternatives are first restored exhaustively, so choices
BitOpt passed over still reach the archive. Every entry is then shrunk to
the least coverage that keeps every defender payoff, and freed budget is
spent on attack-set extensions that improve some payoff without lowering
another.
"""

import logging
from functools import partial
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..game.core import EPS, GameInstance, dominates, fitness, is_feasible
from ..game.discretize import IdealProfile, TargetOrder, gene_coverage, gene_payoffs
from ..utils.parallel import WorkerPool
from .archive import ArchiveEntry, FrontArchive
from .evaluate import alternatives, candidate_values, combination_count, restore_exhaustive

logger = logging.getLogger(__name__)

PayoffTable = List[np.ndarray]

# Largest per-code product of alternatives restored exhaustively.
POLISH_LIMIT = 4096
# Visited codes are screened in chunks of this many rows.
SCREEN_CHUNK = 1024


def payoff_table(inst: GameInstance, order: TargetOrder, ideal: IdealProfile) -> PayoffTable:
    """Per attacker, single-attacker defender payoff of every gene value 1..gamma_max."""
    return [gene_payoffs(inst, order, ideal, i) for i in range(inst.num_attackers)]


def assemble(
    inst: GameInstance, order: TargetOrder, ideal: IdealProfile, code: Sequence[int]
) -> np.ndarray:
    """Componentwise maximum of every attacker's gene coverage."""
    cover = np.zeros(inst.num_targets)
    for i, k in enumerate(code):
        cover = np.maximum(cover, gene_coverage(inst, order, ideal, i, int(k)))
    return cover


def polish_code(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    code: Sequence[int],
    limit: int = POLISH_LIMIT,
) -> List[ArchiveEntry]:
    """
    Exhaustive restoration of one code.

    Returns:
        List[ArchiveEntry]: Non-dominated feasible restorations, or nothing
        when the code allows more than ``limit`` combinations
    """
    values = candidate_values(alternatives(inst, order, ideal, code))
    if combination_count(values) > limit:
        return []
    covers, fits = restore_exhaustive(inst, values)
    genes = np.asarray(code, dtype=int)
    return [ArchiveEntry(code=genes.copy(), coverage=c, fitness=f) for c, f in zip(covers, fits)]


def screen_codes(order: TargetOrder, codes: np.ndarray, limit: int = POLISH_LIMIT) -> np.ndarray:
    """
    Drop codes whose attack sets jointly span too many targets to enumerate.

    Apart from one anchor per attacker (and ties with it), every spanned
    target offers a non-zero alternative and at least doubles the product.
    """
    codes = np.atleast_2d(np.asarray(codes, dtype=int))
    if not codes.size:
        return codes
    position = np.argsort(order.ranks, axis=1)
    bound = np.log2(max(limit, 1)) + codes.shape[1]
    keep = []
    for start in range(0, len(codes), SCREEN_CHUNK):
        chunk = codes[start : start + SCREEN_CHUNK]
        spans = (position[None, :, :] < chunk[:, :, None]).any(axis=1).sum(axis=1)
        keep.append(spans <= bound)
    return codes[np.concatenate(keep)]


def _improves(new: np.ndarray, old: np.ndarray) -> bool:
    return bool(np.any(new > old + EPS))


def _keeps(new: np.ndarray, current: np.ndarray, floor: np.ndarray) -> bool:
    return dominates(new, current, EPS).weak and bool(np.all(new >= floor - EPS))


def _shrink(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    table: PayoffTable,
    entry: ArchiveEntry,
    floor: np.ndarray,
) -> Optional[ArchiveEntry]:
    code = np.empty(inst.num_attackers, dtype=int)
    for i in range(inst.num_attackers):
        reach = np.flatnonzero(table[i] >= entry.fitness[i] - EPS)
        code[i] = int(reach[0]) + 1 if len(reach) else int(ideal.gamma_max[i])
    cover = assemble(inst, order, ideal, code)
    if not is_feasible(inst, cover):
        return None
    fit = fitness(inst, cover)
    if not _keeps(fit, entry.fitness, floor):
        return None
    if cover.sum() < entry.resources - EPS or _improves(fit, entry.fitness):
        return ArchiveEntry(code=code, coverage=cover, fitness=fit)
    return None


def _extend(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    entry: ArchiveEntry,
    floor: np.ndarray,
) -> Optional[ArchiveEntry]:
    best: Optional[ArchiveEntry] = None
    best_ratio = -np.inf
    for i in range(inst.num_attackers):
        if entry.code[i] >= ideal.gamma_max[i]:
            continue
        code = np.array(entry.code, dtype=int)
        code[i] += 1
        cover = assemble(inst, order, ideal, code)
        if not is_feasible(inst, cover):
            continue
        fit = fitness(inst, cover)
        if not _keeps(fit, entry.fitness, floor) or not _improves(fit, entry.fitness):
            continue
        extra = cover.sum() - entry.resources
        gain = float(np.sum(fit - entry.fitness))
        ratio = np.inf if extra <= EPS else gain / extra
        if ratio > best_ratio:
            best, best_ratio = ArchiveEntry(code=code, coverage=cover, fitness=fit), ratio
    return best


def min_cov(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    entry: ArchiveEntry,
    table: Optional[PayoffTable] = None,
) -> ArchiveEntry:
    """
    Refine one feasible entry without lowering any defender payoff.

    Alternates a shrink step (shortest prefix per attacker that still
    reaches its current payoff, merged by componentwise maximum) with
    single attack-set extensions ranked by payoff gain per unit of extra
    budget, until neither changes the entry.

    Args:
        inst: Game instance
        order: Target order
        ideal: Ideal profile
        entry: Feasible archive entry with an in-bounds I-code
        table: Precomputed ``payoff_table``; built when omitted

    Returns:
        ArchiveEntry: The original entry or one weakly dominating it
    """
    if np.all(entry.fitness >= ideal.ideal_fitness - EPS):
        return entry
    if table is None:
        table = payoff_table(inst, order, ideal)
    current = entry
    # each accepted step strictly improves fitness or budget on a finite code lattice
    for _ in range(int(np.sum(ideal.gamma_max)) * 4 + 4):
        changed = False
        shrunk = _shrink(inst, order, ideal, table, current, entry.fitness)
        if shrunk is not None:
            current, changed = shrunk, True
        extended = _extend(inst, order, ideal, current, entry.fitness)
        if extended is not None:
            current, changed = extended, True
        if not changed:
            break
    return current


def refine_archive(
    inst: GameInstance,
    order: TargetOrder,
    ideal: IdealProfile,
    archive: FrontArchive,
    pool: Optional[WorkerPool] = None,
    codes: Optional[Iterable[Sequence[int]]] = None,
    polish_limit: int = POLISH_LIMIT,
) -> FrontArchive:
    """
    Offer exhaustive restorations of ``codes``, then apply ``min_cov`` to
    every entry once and re-prune.

    Args:
        inst: Game instance
        order: Target order
        ideal: Ideal profile
        archive: Search archive
        pool: Worker pool for both passes; in-process when omitted
        codes: I-codes to restore exhaustively; none when omitted
        polish_limit: Per-code combination cap of the exhaustive restoration

    Returns:
        FrontArchive: A new archive; the input is left untouched
    """
    entries = list(archive)
    code_list = [np.asarray(c, dtype=int) for c in codes] if codes is not None else []
    if code_list and polish_limit > 0:
        polish = partial(polish_code, inst, order, ideal, limit=polish_limit)
        if pool is not None:
            batches = pool.map(polish, code_list)
        else:
            batches = [polish(c) for c in code_list]
        offered = [e for batch in batches for e in batch]
        merged = FrontArchive.from_entries(entries + offered, tol=archive.tol)
        logger.info(
            f"Exhaustive restoration of {len(code_list)} codes offered {len(offered)} entries, "
            f"archive {len(entries)} -> {len(merged)}"
        )
        entries = list(merged)
    if not entries:
        return FrontArchive(tol=archive.tol)
    table = payoff_table(inst, order, ideal)
    fn = partial(min_cov, inst, order, ideal, table=table)
    refined = pool.map(fn, entries) if pool is not None else [fn(e) for e in entries]
    improved = sum(
        1
        for old, new in zip(entries, refined)
        if new.resources != old.resources or np.any(new.fitness != old.fitness)
    )
    out = FrontArchive.from_entries(refined, tol=archive.tol)
    logger.info(
        f"Refined {len(entries)} entries ({improved} changed), "
        f"archive {len(entries)} -> {len(out)}"
    )
    return out
