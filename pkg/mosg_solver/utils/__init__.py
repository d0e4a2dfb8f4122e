"""
Logging, file I/O and process-pool helpers.
"""

from .data_loader import load_front, load_instance, load_run_config, save_instance
from .data_processor import archive_to_frame, write_front, write_manifest, write_table
from .logger import setup_logger
from .parallel import WorkerPool

__all__ = [
    "WorkerPool",
    "archive_to_frame",
    "load_front",
    "load_instance",
    "load_run_config",
    "save_instance",
    "setup_logger",
    "write_front",
    "write_manifest",
    "write_table",
]
