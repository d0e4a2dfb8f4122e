"""
Data loading utilities: instance JSON, front CSVs and YAML run files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd
import yaml

from ..game.core import GameInstance
from ..game.errors import DataFileError, InstanceValidationError, MOSGError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def load_instance(path: PathLike) -> GameInstance:
    """
    Load and validate a game instance from JSON.

    Args:
        path: Instance file

    Returns:
        GameInstance: Validated instance

    Raises:
        InstanceValidationError: If the content violates the schema or an invariant
        DataFileError: If the file cannot be read or parsed
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise InstanceValidationError("instance file must hold a JSON object")
        inst = GameInstance.from_dict(data)
        logger.info(
            f"Loaded instance {path}: n={inst.num_attackers}, t={inst.num_targets}, "
            f"r={inst.resource_ratio}"
        )
        return inst
    except Exception as e:
        if not isinstance(e, MOSGError):
            e = DataFileError(f"Failed to read instance {path}: {e}")
        raise e


def save_instance(inst: GameInstance, path: PathLike) -> Path:
    """Write an instance as JSON, creating parent directories."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        json.dump(inst.to_dict(), f, indent=2)
    logger.info(f"Wrote instance {out}")
    return out


def load_front(path: PathLike) -> pd.DataFrame:
    """
    Read a front CSV.

    Raises:
        DataFileError: If the file is unreadable or has no ``f*`` columns
    """
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except Exception as e:
        raise DataFileError(f"Failed to read front {path}: {e}")
    if not _columns(df, "f"):
        raise DataFileError(f"Front {path} has no fitness columns (f1..fN)")
    return df


def _columns(df: pd.DataFrame, prefix: str) -> List[str]:
    cols = [c for c in df.columns if c.startswith(prefix) and c[len(prefix) :].isdigit()]
    return sorted(cols, key=lambda c: int(c[len(prefix) :]))


def front_fitness(df: pd.DataFrame) -> np.ndarray:
    """Fitness matrix from the ``f1..fN`` columns."""
    return df[_columns(df, "f")].to_numpy(dtype=float)


def front_coverage(df: pd.DataFrame) -> np.ndarray:
    """
    Coverage matrix from the ``c1..cT`` columns.

    Raises:
        DataFileError: If the front carries no coverage columns
    """
    cols = _columns(df, "c")
    if not cols:
        raise DataFileError("Front has no coverage columns (c1..cT)")
    return df[cols].to_numpy(dtype=float)


def front_codes(df: pd.DataFrame) -> np.ndarray:
    return df[_columns(df, "i")].to_numpy(dtype=int)


def load_fronts(file_paths: Dict[str, PathLike]) -> Dict[str, np.ndarray]:
    """
    Load several fronts' fitness matrices.

    Args:
        file_paths: Dictionary mapping labels to front files

    Returns:
        Dictionary mapping labels to (K, N) fitness arrays
    """
    return {name: front_fitness(load_front(path)) for name, path in file_paths.items()}


def load_run_config(path: PathLike) -> Dict[str, Any]:
    """
    Load a YAML run file.

    Raises:
        DataFileError: If the file is unreadable or not a mapping
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except Exception as e:
        raise DataFileError(f"Failed to read run config {path}: {e}")
    if not isinstance(data, dict):
        raise DataFileError(f"Run config {path} must be a mapping")
    return data
