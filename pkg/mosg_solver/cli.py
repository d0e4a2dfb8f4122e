"""
Command-line entry point: ``mosg <command> [flags]``.

Exit codes: 0 success, 1 usage, 2 invalid input or configuration,
3 property or verification failure, 4 time limit.
"""

import argparse
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from . import __version__
from .bench.ablation import ABLATION_VARIANTS, ablation_run, ablation_summary
from .bench.generator import BenchConfig, generate_instance, payoff_table
from .bench.oracle import oracle_front
from .bench.properties import property_suite
from .bench.scaling import linear_fit, population_sweep, scaling_run
from .config import Config
from .game.core import BUDGET_TOL, EPS, GameInstance, fitness, pareto_indices
from .game.discretize import ideal_profile, target_order
from .game.errors import MOSGError, SolverTimeoutError
from .metrics import build_reference, hypervolume, igd_plus
from .solver.archive import ArchiveEntry, FrontArchive
from .solver.moea import CROSSOVERS, RESTORATION_MODES, EAConfig, solve
from .utils.data_loader import (
    front_codes,
    front_coverage,
    front_fitness,
    load_front,
    load_fronts,
    load_instance,
    load_run_config,
    save_instance,
)
from .utils.data_processor import (
    history_to_frame,
    write_front,
    write_manifest,
    write_table,
)
from .utils.logger import setup_logger

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_FAILED = 3
EXIT_TIMEOUT = 4


class PropertyFailure(Exception):
    """A check ran to completion and found violations."""

    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _ratio(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"resource ratio must lie in (0, 1], got {text}")
    return value


def _int_list(text: str) -> List[int]:
    try:
        return [_positive_int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _grid(text: str) -> List[Tuple[int, int]]:
    """Parse ``3x200,3x400`` into (attackers, targets) cells."""
    cells = []
    for part in text.split(","):
        try:
            n, t = (int(v) for v in part.lower().split("x"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid cells look like NxT, got {part!r}")
        cells.append((n, t))
    return cells


def _solver_config(args: argparse.Namespace) -> EAConfig:
    """EAConfig from an optional YAML ``solver`` block, overridden by flags."""
    data: Dict[str, Any] = {}
    if getattr(args, "config", None):
        data = dict(load_run_config(args.config).get("solver", {}))
    overrides = {
        "seed": getattr(args, "seed", None),
        "pop_size": getattr(args, "pop_size", None),
        "max_gen": getattr(args, "max_gen", None),
        "restoration": getattr(args, "restoration", None),
        "crossover": getattr(args, "crossover", None),
        "time_limit": getattr(args, "time_limit", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "no_refine", False):
        data["refine"] = False
    if getattr(args, "history", False):
        data["track_history"] = True
    data.setdefault("show_progress", Config.SHOW_PROGRESS)
    return EAConfig.from_dict(data)


def _bench_config(args: argparse.Namespace) -> BenchConfig:
    """BenchConfig from an optional YAML run file, overridden by flags."""
    data: Dict[str, Any] = {}
    if getattr(args, "config", None):
        data = asdict(BenchConfig.from_yaml(args.config))
    overrides = {
        "attackers": getattr(args, "attackers", None),
        "targets": getattr(args, "targets", None),
        "resource_ratio": getattr(args, "resource_ratio", None),
        "seed": getattr(args, "seed", None),
        "repeats": getattr(args, "repeats", None),
        "time_cap": getattr(args, "time_cap", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return BenchConfig.from_dict(data)


def _bench_solver(args: argparse.Namespace, bench: BenchConfig) -> EAConfig:
    data = dict(bench.solver)
    for key in ("pop_size", "max_gen"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return EAConfig.from_dict(data)


def verify_front(inst: GameInstance, df: pd.DataFrame) -> List[str]:
    """
    Revalidate a front table against its instance.

    Checks every row's coverage for feasibility, recomputes its fitness,
    checks I-codes against their bounds and the rows for mutual
    non-dominance.

    Returns:
        List of problems; empty when the front is valid
    """
    problems: List[str] = []
    fits = front_fitness(df)
    covers = front_coverage(df)
    if fits.shape[1] != inst.num_attackers or covers.shape[1] != inst.num_targets:
        return [
            f"front has shape f{fits.shape[1]}/c{covers.shape[1]}, instance is "
            f"{inst.num_attackers}x{inst.num_targets}"
        ]
    codes = front_codes(df)
    gamma_max = ideal_profile(inst, target_order(inst)).gamma_max if codes.size else None
    for row, (f, c) in enumerate(zip(fits, covers)):
        if np.any(c < -BUDGET_TOL) or np.any(c > 1.0 + BUDGET_TOL):
            problems.append(f"row {row}: coverage outside [0, 1]")
            continue
        if c.sum() > inst.budget + BUDGET_TOL:
            problems.append(f"row {row}: coverage {c.sum():.12g} exceeds budget {inst.budget}")
            continue
        recomputed = fitness(inst, np.clip(c, 0.0, 1.0))
        if np.any(np.abs(recomputed - f) > EPS):
            problems.append(
                f"row {row}: fitness {f.tolist()} but coverage gives {recomputed.tolist()}"
            )
        if gamma_max is not None and (np.any(codes[row] < 1) or np.any(codes[row] > gamma_max)):
            problems.append(f"row {row}: I-code {codes[row].tolist()} out of bounds")
    if len(fits) and len(pareto_indices(fits)) != len(fits):
        problems.append("rows are not mutually non-dominated")
    return problems


def cmd_gen(args: argparse.Namespace) -> int:
    bench = BenchConfig(
        attackers=args.attackers,
        targets=args.targets,
        resource_ratio=args.resource_ratio,
        seed=args.seed,
    )
    inst = generate_instance(bench)
    out = save_instance(inst, args.out)
    if args.table:
        write_table(payoff_table(inst), out.with_suffix(".payoffs.csv"))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    config = _solver_config(args)
    workers = Config.resolve_workers(args.workers)
    prefix = Path(args.out_prefix)
    start = time.perf_counter()
    result = solve(inst, config, workers=workers)
    elapsed = time.perf_counter() - start

    write_front(inst, result.archive, f"{prefix}.front.csv")
    if args.history:
        write_table(history_to_frame(result.history), f"{prefix}.history.csv")
    write_manifest(
        {
            "command": "solve",
            "version": __version__,
            "instance": str(args.instance),
            "config": config.resolved(inst.num_attackers).to_dict(),
            "workers": workers,
            "runtime_seconds": elapsed,
            "eval_seconds": result.eval_seconds,
            "eval_ops": result.eval_ops,
            "generations": result.generations,
            "evaluations": result.evaluations,
            "archive_size": len(result.archive),
        },
        f"{prefix}.run.json",
    )
    print(
        f"archive size {len(result.archive)} after {result.generations} generations "
        f"({elapsed:.2f}s)"
    )
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    front = oracle_front(inst, max_codes=args.max_codes, max_combinations=args.max_combinations)
    entries = [
        ArchiveEntry(code=code, coverage=cov, fitness=fit)
        for fit, code, cov in zip(front.fitness, front.codes, front.coverages)
    ]
    write_front(inst, FrontArchive.from_entries(entries, tol=0.0), args.out)
    print(f"oracle front: {len(front)} points")
    return EXIT_OK


def cmd_props(args: argparse.Namespace) -> int:
    report = property_suite(
        seed=args.seed, trials=args.trials, show_progress=Config.SHOW_PROGRESS
    )
    print(report.summary())
    if args.out:
        write_table(report.to_frame(), args.out)
    if not report.ok:
        raise PropertyFailure(f"{report.failures} property failures")
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    bench = _bench_config(args)
    table = ablation_run(
        bench,
        ea=_bench_solver(args, bench),
        variants=args.variants,
        workers=Config.resolve_workers(args.workers),
    )
    write_table(table, args.out)
    print(ablation_summary(table).to_string())
    return EXIT_TIMEOUT if table["timeout"].any() else EXIT_OK


def _report_fit(table: pd.DataFrame, axis: str) -> None:
    done = table[~table["timeout"]]
    if done[axis].nunique() < 2:
        return
    means = done.groupby(axis)[["eval_ms", "eval_ops"]].mean()
    for column in ("eval_ms", "eval_ops"):
        slope, intercept, r2 = linear_fit(means.index.to_numpy(), means[column].to_numpy())
        print(f"{column} ~ {slope:.4g} * {axis} + {intercept:.4g}  (R^2 = {r2:.4f})")


def cmd_bench(args: argparse.Namespace) -> int:
    bench = _bench_config(args)
    ea = _bench_solver(args, bench)
    workers = Config.resolve_workers(args.workers)
    if args.pop_sizes:
        table = population_sweep(bench, args.pop_sizes, ea=ea, workers=workers)
        write_table(table, args.out)
        print(table.groupby("pop_size")[["hv", "igdplus", "runtime_ms"]].mean().to_string())
        return EXIT_OK

    table = scaling_run(bench, cells=args.grid, ea=ea, workers=workers)
    write_table(table, args.out)
    for axis in ("t", "n"):
        if table[axis].nunique() > 1 and table["n" if axis == "t" else "t"].nunique() == 1:
            _report_fit(table, axis)
    return EXIT_TIMEOUT if table["timeout"].any() else EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    fronts = load_fronts({"front": args.front, "ref": args.ref})
    front, reference = fronts["front"], fronts["ref"]
    if args.hv_ref == "auto":
        ref_point = build_reference([front, reference]).ref_point
    else:
        ref_point = -np.array([float(v) for v in args.hv_ref.split(",")])
    hv = hypervolume(-front, ref_point)
    igd = igd_plus(front, reference, maximize=True)
    print(f"hv {hv:.17g}")
    print(f"igdplus {igd:.17g}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    problems = verify_front(inst, load_front(args.front))
    for p in problems:
        print(p)
    if problems:
        raise PropertyFailure(f"{len(problems)} problems in {args.front}")
    print("front OK")
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pop-size", type=_positive_int)
    p.add_argument("--max-gen", type=_positive_int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mosg", description="Multi-objective security game solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("-n", "--attackers", type=_positive_int, required=True)
    p.add_argument("-t", "--targets", type=_positive_int, required=True)
    p.add_argument("-r", "--resource-ratio", type=_ratio, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--table", action="store_true", help="also write a long payoff table")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="approximate the Pareto front of an instance")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_solver_flags(p)
    p.add_argument("--restoration", choices=RESTORATION_MODES)
    p.add_argument("--crossover", choices=CROSSOVERS)
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--time-limit", type=float, help="seconds")
    p.add_argument("--history", action="store_true", help="write a convergence history CSV")
    p.add_argument("--config", help="YAML run file with a solver block")
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--out-prefix", default="front")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive front of a small instance")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--max-codes", type=_positive_int, default=100_000)
    p.add_argument("--max-combinations", type=_positive_int, default=1_000_000)
    p.add_argument("-o", "--out", default="oracle.front.csv")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("props", help="randomized property suite")
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help="CSV of per-property counts")
    p.set_defaults(func=cmd_props)

    for name, func, help_text in (
        ("ablate", cmd_ablate, "compare solver variants"),
        ("bench", cmd_bench, "runtime scaling or population sweep"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="YAML run file")
        p.add_argument("-n", "--attackers", type=_positive_int)
        p.add_argument("-t", "--targets", type=_positive_int)
        p.add_argument("-r", "--resource-ratio", type=_ratio)
        p.add_argument("--seed", type=int)
        p.add_argument("--repeats", type=_positive_int)
        p.add_argument("--time-cap", type=float, help="minutes per run")
        _add_solver_flags(p)
        p.add_argument("--workers", type=_positive_int)
        p.add_argument("-o", "--out", default=str(Path(Config.RESULTS_DIR) / f"{name}.csv"))
        p.set_defaults(func=func)
        if name == "ablate":
            p.add_argument("--variants", nargs="+", choices=list(ABLATION_VARIANTS))
        else:
            p.add_argument("--grid", type=_grid, help="cells as NxT, comma separated")
            p.add_argument("--pop-sizes", type=_int_list, help="run a population sweep instead")

    p = sub.add_parser("metrics", help="hypervolume and IGD+ of a front CSV")
    p.add_argument("--front", required=True)
    p.add_argument("--ref", required=True, help="reference front CSV")
    p.add_argument("--hv-ref", default="auto", help="'auto' or comma-separated payoffs")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("verify", help="revalidate a front CSV against its instance")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--front", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger(level="DEBUG" if args.verbose else Config.LOG_LEVEL)
    try:
        return int(args.func(args))
    except SolverTimeoutError as e:
        logger.error(str(e))
        return EXIT_TIMEOUT
    except PropertyFailure as e:
        logger.error(str(e))
        return EXIT_FAILED
    except MOSGError as e:
        logger.error(str(e))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
