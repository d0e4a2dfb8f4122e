"""
Script to run the acceptance sweeps through the ``mosg`` CLI.

Results go under ``results/acceptance``. Exits non-zero on the first
failing step.
"""

import filecmp
import subprocess
import sys
from pathlib import Path
from typing import Tuple

import numpy as np

from mosg_solver.utils.data_loader import front_fitness, load_front

OUT = Path("results") / "acceptance"
ORACLE_TOL = 1e-6


def run_command(command: str) -> None:
    """Run a mosg command and exit if it fails."""
    print(f"$ mosg {command}")
    try:
        subprocess.run([sys.executable, "-m", "mosg_solver.cli", *command.split()], check=True)
    except subprocess.CalledProcessError as e:
        print(f"Error running command: mosg {command}")
        print(e)
        sys.exit(1)


def matched(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per row of a, whether some row of b lies within ORACLE_TOL in max-norm."""
    if not len(b):
        return np.zeros(len(a), dtype=bool)
    gap = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    return gap.min(axis=1) <= ORACLE_TOL


def compare_fronts(front: Path, oracle: Path) -> Tuple[bool, bool]:
    """(subset, equal) of a solver front against the oracle front."""
    fa = front_fitness(load_front(front))
    fb = front_fitness(load_front(oracle))
    subset = bool(matched(fa, fb).all())
    return subset, subset and bool(matched(fb, fa).all())


def oracle_sweep() -> None:
    matches, subsets, total = 0, 0, 0
    for n in (2, 3):
        for t in (3, 4, 5):
            for r in (0.3, 0.5):
                for seed in range(4):
                    stem = OUT / "oracle" / f"n{n}_t{t}_r{r}_s{seed}"
                    run_command(f"gen -n {n} -t {t} -r {r} --seed {seed} -o {stem}.json")
                    run_command(
                        f"solve -i {stem}.json --seed {seed} --pop-size 50 --max-gen 50 "
                        f"--out-prefix {stem}"
                    )
                    run_command(f"oracle -i {stem}.json -o {stem}.oracle.csv")
                    subset, equal = compare_fronts(
                        Path(f"{stem}.front.csv"), Path(f"{stem}.oracle.csv")
                    )
                    total += 1
                    subsets += subset
                    matches += equal
    print(f"Oracle equivalence: {matches}/{total} equal, {subsets}/{total} subset")
    if matches < 0.95 * total or subsets < total:
        sys.exit(1)


def determinism() -> None:
    inst = OUT / "det" / "instance.json"
    run_command(f"gen -n 3 -t 25 --seed 1 -o {inst}")
    for tag, workers in (("a", 1), ("b", 1), ("c", 8)):
        run_command(
            f"solve -i {inst} --seed 3 --pop-size 50 --max-gen 20 --workers {workers} "
            f"--out-prefix {OUT / 'det' / tag}"
        )
    fronts = [OUT / "det" / f"{tag}.front.csv" for tag in "abc"]
    if not all(filecmp.cmp(fronts[0], f, shallow=False) for f in fronts[1:]):
        print("Front CSVs differ across runs or worker counts")
        sys.exit(1)


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    print("Property suite...")
    run_command(f"props --trials 1000 --seed 7 -o {OUT / 'props.csv'}")

    print("Oracle equivalence...")
    oracle_sweep()

    print("Determinism...")
    determinism()

    print("Ablation...")
    run_command(f"ablate --config run_configs/ablation_n5_t50.yaml -o {OUT / 'ablation.csv'}")

    print("Scaling...")
    for name in ("scaling_targets", "scaling_attackers"):
        run_command(f"bench --config run_configs/{name}.yaml -o {OUT / (name + '.csv')}")


if __name__ == "__main__":
    main()
