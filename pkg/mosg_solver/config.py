import os
from typing import Optional

from dotenv import load_dotenv

from .game.errors import ConfigError

load_dotenv()

WORKERS_ENV = "MOSG_WORKERS"


class Config:
    # Runtime
    WORKERS = os.getenv(WORKERS_ENV)
    LOG_LEVEL = os.getenv("MOSG_LOG_LEVEL", "INFO")
    SHOW_PROGRESS = os.getenv("MOSG_PROGRESS", "1").strip().lower() not in ("0", "false", "no")

    # Benchmark output
    RESULTS_DIR = os.getenv("MOSG_RESULTS_DIR", "results")

    @classmethod
    def resolve_workers(cls, flag: Optional[int] = None) -> int:
        """
        Worker count: the CLI flag, else WORKERS (from MOSG_WORKERS), else 1.

        Raises:
            ConfigError: If the value is not an integer of at least 1
        """
        raw = flag if flag is not None else cls.WORKERS
        if raw is None or raw == "":
            return 1
        try:
            workers = int(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"workers must be an integer, got {raw!r}")
        if workers < 1:
            raise ConfigError(f"workers must be at least 1, got {workers}")
        return workers
