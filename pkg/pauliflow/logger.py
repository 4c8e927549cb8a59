"""
Copyright (c) 2024 The pauliflow authors.
"""
import logging
import os
from typing import Optional, Union

from rich.console import Console
from rich.logging import RichHandler

ENV_VAR = "PAULIFLOW_LOG"


def setup_logging(level: Optional[Union[int, str]] = None) -> logging.Logger:
    """Install a rich log handler on the `pauliflow` logger.

    Args:
        level: Log level name or number. If None, it is read from the
            `PAULIFLOW_LOG` environment variable. Default to "WARNING".

    Returns:
        The configured `pauliflow` logger.
    """
    if level is None:
        level = os.getenv(ENV_VAR, "WARNING")
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"Unknown log level {level!r}.")
        level = resolved

    logger = logging.getLogger("pauliflow")
    logger.setLevel(level)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(console=Console(stderr=True), show_path=False)
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    logger.propagate = False
    return logger
