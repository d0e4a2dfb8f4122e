"""
Logging configuration.
"""

import logging
from typing import Union

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logger(
    name: str = "mosg_solver", level: Union[int, str] = logging.INFO
) -> logging.Logger:
    """
    Set up a logger with the specified name and level.

    Calling it again for the same name only updates the level.

    Args:
        name: Name for the logger
        level: Logging level, as a number or a name such as "DEBUG"

    Returns:
        Configured logger instance
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not any(getattr(h, "_mosg_handler", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._mosg_handler = True  # type: ignore[attr-defined]
        logger.addHandler(handler)

    return logger
