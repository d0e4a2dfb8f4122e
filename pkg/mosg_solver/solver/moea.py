"""
Reference-direction many-objective evolutionary search over I-codes.

``solve`` discretizes the instance, evolves a population of I-codes
(BitOpt restores each to a coverage vector), keeps every feasible result
in a non-dominated archive and finally refines that archive. The same
generation loop also drives the continuous-coverage baseline used in
ablations.
"""

import logging
import time
from dataclasses import asdict, dataclass, field, fields, replace
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Set, Tuple

import numpy as np
from tqdm import tqdm

from ..game.core import EPS, GameInstance, attacker_payoffs
from ..game.discretize import (
    IdealProfile,
    TargetOrder,
    code_lattice,
    ideal_profile,
    lattice_size,
    target_order,
)
from ..game.errors import ConfigError, SolverTimeoutError
from ..metrics import fixed_reference_point, hypervolume
from ..utils.parallel import WorkerPool
from .archive import ArchiveEntry, FrontArchive
from .directions import riesz_directions
from .evaluate import EvaluationResult, evaluate_code, evaluate_coverage, restore_random
from .operators import vary
from .refine import POLISH_LIMIT, refine_archive, screen_codes
from .selection import Individual, Population, survive

logger = logging.getLogger(__name__)

RESTORATION_MODES = ("bitopt", "random")
CROSSOVERS = ("sbx", "hux")
GENOMES = ("icode", "coverage")
# Monte-Carlo samples per history point when N is too large for exact hypervolume.
HISTORY_HV_SAMPLES = 100_000

GenerationCallback = Callable[[int, FrontArchive], None]


@dataclass
class EAConfig:
    """
    Solver parameters.

    ``pop_size``, ``max_gen`` and ``mutation_prob`` default by objective
    count; call ``resolved`` to fill them in.

    Refinement restores codes exhaustively when they allow at most
    ``polish_limit`` combinations: every in-bounds code when the lattice has
    at most ``polish_codes`` of them, otherwise every code the search visited.
    ``polish_limit=0`` turns this off.
    """

    pop_size: Optional[int] = None
    max_gen: Optional[int] = None
    seed: int = 0
    crossover: str = "sbx"
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    mutation_prob: Optional[float] = None
    mutation_eta: float = 20.0
    genome: str = "icode"
    restoration: str = "bitopt"
    refine: bool = True
    polish_codes: int = 1024
    polish_limit: int = POLISH_LIMIT
    time_limit: Optional[float] = None
    track_history: bool = False
    show_progress: bool = False

    def resolved(self, n_obj: int) -> "EAConfig":
        """
        Copy with defaults filled for ``n_obj`` objectives, validated.

        Raises:
            ConfigError: If any parameter is out of range
        """
        small = n_obj == 3
        cfg = replace(
            self,
            pop_size=self.pop_size if self.pop_size is not None else (50 if small else 400),
            max_gen=self.max_gen if self.max_gen is not None else (50 if small else 300),
            mutation_prob=self.mutation_prob if self.mutation_prob is not None else 1.0 / n_obj,
        )
        cfg.validate(n_obj)
        return cfg

    def validate(self, n_obj: int) -> None:
        if self.pop_size is None or self.pop_size < n_obj:
            raise ConfigError(f"pop_size={self.pop_size} must be at least n={n_obj}")
        if self.max_gen is None or self.max_gen < 1:
            raise ConfigError(f"max_gen={self.max_gen} must be at least 1")
        if self.crossover not in CROSSOVERS:
            raise ConfigError(f"crossover must be one of {CROSSOVERS}, got '{self.crossover}'")
        if self.genome not in GENOMES:
            raise ConfigError(f"genome must be one of {GENOMES}, got '{self.genome}'")
        if self.restoration not in RESTORATION_MODES:
            raise ConfigError(
                f"restoration must be one of {RESTORATION_MODES}, got '{self.restoration}'"
            )
        if self.genome == "coverage" and (self.restoration != "bitopt" or self.refine):
            raise ConfigError("restoration and refinement need the discretized genome")
        for name in ("crossover_prob", "mutation_prob"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name}={value} must lie in [0, 1]")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigError(f"time_limit={self.time_limit} must be positive")
        for name in ("polish_codes", "polish_limit"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}={getattr(self, name)} must not be negative")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EAConfig":
        """Build from a mapping (e.g. the ``solver`` block of a YAML run file)."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown solver settings: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class GenerationRecord:
    generation: int
    archive_size: int
    evaluations: int
    hv: float = float("nan")


@dataclass
class SolveResult:
    """Final archive plus run statistics."""

    archive: FrontArchive
    generations: int
    evaluations: int
    eval_seconds: float
    eval_ops: int
    runtime_seconds: float
    history: List[GenerationRecord] = field(default_factory=list)


class ICodeProblem:
    """Integer genomes in [1, gamma_max], restored by BitOpt or at random."""

    integer = True

    def __init__(
        self,
        inst: GameInstance,
        order: TargetOrder,
        ideal: IdealProfile,
        restoration: str = "bitopt",
    ):
        self.inst = inst
        self.order = order
        self.ideal = ideal
        self.restoration = restoration
        self.lower = np.ones(inst.num_attackers, dtype=int)
        self.upper = np.asarray(ideal.gamma_max, dtype=int)
        self.visited: Set[Tuple[int, ...]] = set()

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.integers(self.lower, self.upper + 1, size=(n, len(self.upper)))

    def evaluate(
        self, genomes: np.ndarray, rng: np.random.Generator, pool: WorkerPool
    ) -> List[EvaluationResult]:
        self.visited.update(tuple(int(g) for g in genome) for genome in genomes)
        if self.restoration == "random":
            # seeds drawn up front so worker scheduling cannot change the stream
            seeds = rng.integers(0, 2**63 - 1, size=len(genomes))
            fn = partial(restore_random, self.inst, self.order, self.ideal)
            return pool.map(fn, list(genomes), [int(s) for s in seeds])
        return pool.map(partial(evaluate_code, self.inst, self.order, self.ideal), list(genomes))

    def visited_codes(self) -> np.ndarray:
        """Distinct evaluated codes, sorted."""
        if not self.visited:
            return np.empty((0, len(self.upper)), dtype=int)
        return np.array(sorted(self.visited), dtype=int)

    def entry(self, genome: np.ndarray, result: EvaluationResult) -> ArchiveEntry:
        assert result.fitness is not None
        return ArchiveEntry(
            code=np.asarray(genome, dtype=int), coverage=result.coverage, fitness=result.fitness
        )


class CoverageProblem:
    """Real genomes in [0, 1]^T, scaled into the budget before scoring."""

    integer = False

    def __init__(self, inst: GameInstance, ideal: IdealProfile):
        self.inst = inst
        self.ideal = ideal
        self.lower = np.zeros(inst.num_targets)
        self.upper = np.ones(inst.num_targets)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.random((n, self.inst.num_targets))

    def evaluate(
        self, genomes: np.ndarray, rng: np.random.Generator, pool: WorkerPool
    ) -> List[EvaluationResult]:
        return pool.map(partial(evaluate_coverage, self.inst, self.ideal), list(genomes))

    def entry(self, genome: np.ndarray, result: EvaluationResult) -> ArchiveEntry:
        assert result.fitness is not None
        sizes = np.array(
            [
                int(np.sum(_best_set_mask(self.inst, i, result.coverage)))
                for i in range(self.inst.num_attackers)
            ]
        )
        return ArchiveEntry(code=sizes, coverage=result.coverage, fitness=result.fitness)


def _best_set_mask(inst: GameInstance, i: int, cover: np.ndarray) -> np.ndarray:
    ua = attacker_payoffs(inst, i, cover)
    return ua >= ua.max() - EPS


def _history_reference(inst: GameInstance) -> np.ndarray:
    return fixed_reference_point(inst.u_unc_def.min(axis=1))


def evolve(
    problem: Any,
    config: EAConfig,
    pool: WorkerPool,
    on_generation: Optional[GenerationCallback] = None,
) -> SolveResult:
    """
    Run the generation loop for a resolved config.

    Args:
        problem: ICodeProblem or CoverageProblem
        config: Output of ``EAConfig.resolved``
        pool: Evaluation pool
        on_generation: Called with (generation, archive) after every archive update

    Returns:
        SolveResult: Archive before refinement

    Raises:
        SolverTimeoutError: If ``config.time_limit`` elapses
    """
    assert config.pop_size is not None and config.max_gen is not None
    assert config.mutation_prob is not None
    inst = problem.inst
    rng = np.random.default_rng(config.seed)
    dirs = riesz_directions(inst.num_attackers, config.pop_size, config.seed)
    mutation_prob = config.mutation_prob
    if not problem.integer:
        mutation_prob = 1.0 / inst.num_targets
    ref = _history_reference(inst)

    start = time.perf_counter()
    archive = FrontArchive()
    history: List[GenerationRecord] = []
    counters = {"evaluations": 0, "eval_ops": 0, "eval_seconds": 0.0}

    def assess(genomes: np.ndarray) -> List[Individual]:
        tick = time.perf_counter()
        results = problem.evaluate(genomes, rng, pool)
        counters["eval_seconds"] += time.perf_counter() - tick
        counters["evaluations"] += len(results)
        counters["eval_ops"] += sum(r.ops for r in results)
        archive.update(problem.entry(g, r) for g, r in zip(genomes, results) if r.feasible)
        return [Individual(genome=g, result=r) for g, r in zip(genomes, results)]

    def record(generation: int) -> None:
        hv = float("nan")
        if config.track_history and len(archive):
            hv = hypervolume(-archive.fitness_matrix(), ref, samples=HISTORY_HV_SAMPLES)
        history.append(GenerationRecord(generation, len(archive), counters["evaluations"], hv))
        if on_generation is not None:
            on_generation(generation, archive)
        elapsed = time.perf_counter() - start
        if config.time_limit is not None and elapsed > config.time_limit:
            logger.warning(f"Time limit hit after generation {generation} ({elapsed:.1f}s)")
            raise SolverTimeoutError(elapsed, config.time_limit)

    population: Population = survive(
        assess(problem.sample(rng, config.pop_size)), dirs, config.pop_size, rng
    )
    record(0)

    progress = tqdm(
        range(1, config.max_gen + 1), desc="Generations", disable=not config.show_progress
    )
    for generation in progress:
        offspring = vary(
            population,
            config.pop_size,
            problem.lower,
            problem.upper,
            rng,
            crossover=config.crossover,
            crossover_prob=config.crossover_prob,
            crossover_eta=config.crossover_eta,
            mutation_prob=mutation_prob,
            mutation_eta=config.mutation_eta,
            integer=problem.integer,
        )
        population = survive(population.members + assess(offspring), dirs, config.pop_size, rng)
        progress.set_postfix(archive=len(archive))
        logger.debug(
            f"Generation {generation}: archive {len(archive)}, "
            f"{sum(m.feasible for m in population)}/{len(population)} feasible"
        )
        record(generation)

    return SolveResult(
        archive=archive,
        generations=config.max_gen,
        evaluations=counters["evaluations"],
        eval_seconds=counters["eval_seconds"],
        eval_ops=counters["eval_ops"],
        runtime_seconds=time.perf_counter() - start,
        history=history,
    )


def _polish_candidates(problem: ICodeProblem, config: EAConfig) -> np.ndarray:
    if config.polish_limit == 0:
        return np.empty((0, len(problem.upper)), dtype=int)
    if lattice_size(problem.ideal) <= config.polish_codes:
        return code_lattice(problem.ideal)
    return screen_codes(problem.order, problem.visited_codes(), config.polish_limit)


def prepare(inst: GameInstance) -> Tuple[TargetOrder, IdealProfile]:
    """Target order and ideal profile of an instance."""
    order = target_order(inst)
    ideal = ideal_profile(inst, order)
    logger.info(f"Discretized: gamma_max={ideal.gamma_max.tolist()}")
    return order, ideal


def solve(
    inst: GameInstance,
    config: Optional[EAConfig] = None,
    workers: int = 1,
    on_generation: Optional[GenerationCallback] = None,
) -> SolveResult:
    """
    Approximate the Pareto front of a security game.

    Args:
        inst: Validated game instance
        config: Solver parameters; defaults by objective count
        workers: Evaluation processes; results do not depend on it
        on_generation: Called with (generation, archive) after each generation

    Returns:
        SolveResult: Refined archive and run statistics

    Raises:
        ConfigError: If the config is inconsistent
        SolverTimeoutError: If the time limit elapses
    """
    config = (config or EAConfig()).resolved(inst.num_attackers)
    order, ideal = prepare(inst)
    if config.genome == "coverage":
        problem: Any = CoverageProblem(inst, ideal)
    else:
        problem = ICodeProblem(inst, order, ideal, config.restoration)

    with WorkerPool(workers) as pool:
        result = evolve(problem, config, pool, on_generation)
        logger.info(
            f"Search finished: {result.generations} generations, "
            f"{result.evaluations} evaluations, archive {len(result.archive)}"
        )
        if config.refine:
            tick = time.perf_counter()
            result.archive = refine_archive(
                inst,
                order,
                ideal,
                result.archive,
                pool,
                codes=_polish_candidates(problem, config),
                polish_limit=config.polish_limit,
            )
            result.runtime_seconds += time.perf_counter() - tick
    return result


def run(inst: GameInstance, config: Optional[EAConfig] = None, workers: int = 1) -> FrontArchive:
    """Final archive of ``solve``."""
    return solve(inst, config, workers).archive
