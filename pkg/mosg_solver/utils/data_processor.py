"""
Result tables: front CSVs, convergence histories and run manifests.
"""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

import numpy as np
import pandas as pd

from ..game.core import GameInstance
from ..solver.archive import ArchiveEntry, FrontArchive

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"


def front_columns(inst: GameInstance) -> List[str]:
    n, t = inst.num_attackers, inst.num_targets
    return (
        [f"f{k}" for k in range(1, n + 1)]
        + [f"i{k}" for k in range(1, n + 1)]
        + [f"c{k}" for k in range(1, t + 1)]
    )


def archive_to_frame(
    inst: GameInstance, archive: Union[FrontArchive, Iterable[ArchiveEntry]]
) -> pd.DataFrame:
    """
    One row per archive entry: fitness, I-code and coverage.

    Rows are ordered by fitness, descending lexicographically.
    """
    entries = archive.sorted_entries() if isinstance(archive, FrontArchive) else list(archive)
    rows = [
        np.concatenate([e.fitness, np.asarray(e.code, dtype=float), e.coverage]) for e in entries
    ]
    columns = front_columns(inst)
    df = pd.DataFrame(np.array(rows).reshape(len(rows), len(columns)), columns=columns)
    for k in range(1, inst.num_attackers + 1):
        df[f"i{k}"] = df[f"i{k}"].astype(int)
    return df


def write_table(df: pd.DataFrame, path: PathLike) -> Path:
    """Write a DataFrame as CSV with full float precision."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(df)} rows to {out}")
    return out


def write_front(inst: GameInstance, archive: FrontArchive, path: PathLike) -> Path:
    return write_table(archive_to_frame(inst, archive), path)


def history_to_frame(history: Iterable[Any]) -> pd.DataFrame:
    """Convergence history (generation, archive size, evaluations, hv) as a table."""
    return pd.DataFrame(
        [asdict(h) for h in history],
        columns=["generation", "archive_size", "evaluations", "hv"],
    )


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def write_manifest(manifest: Dict[str, Any], path: PathLike) -> Path:
    """Write a run manifest as JSON."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        json.dump(_jsonable(manifest), f, indent=2, sort_keys=True)
    logger.info(f"Wrote manifest {out}")
    return out
