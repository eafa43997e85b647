"""
Centralized logging configuration for the cyclo-slv toolkit.
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Union

from utils.constants import DEFAULT_LOG_FILE

FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
CONSOLE_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def parse_level(level: Union[int, str]) -> int:
    """
    Turn a level name ("debug", "INFO") or number into a logging level.

    Unknown names fall back to INFO.
    """
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).upper())
    return value if isinstance(value, int) else logging.INFO


def setup_logging(
    log_file: Optional[str] = DEFAULT_LOG_FILE,
    module_name: Optional[str] = None,
    level: Union[int, str] = logging.INFO
) -> logging.Logger:
    """
    Set up logging configuration with consistent formatting.

    The console handler writes to stderr; stdout carries command output only.

    Args:
        log_file: Path to log file. If None or empty, no file handler is added
        module_name: Name of the module for the logger. If None, uses root logger
        level: Logging level (default: INFO)

    Returns:
        Configured logger instance
    """
    level = parse_level(level)
    logger = logging.getLogger(module_name) if module_name else logging.getLogger()
    logger.setLevel(level)

    # Remove any existing handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        file_handler.setLevel(level)
        logger.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    console_handler.setLevel(level)
    logger.addHandler(console_handler)

    return logger
