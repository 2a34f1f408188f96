"""
loguru setup shared by the CLI, the stream server and the API.

Everything goes to stderr: stdout carries verdicts and reports only.
Each record is tagged with the component that emitted it, taken from
``get_logger(name)``; records from plain ``logger`` fall back to the
module name.

Environment:
    FLUXGATE_LOG_LEVEL   console level (default INFO)
    FLUXGATE_LOG_FILE    optional rotating log file, always plain text
"""

import logging
import os
import sys
from pathlib import Path
from typing import Optional

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{extra[component]}</cyan> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {extra[component]} | {process}:{thread.name} | {message}"


def _tag_component(record):
    record["extra"].setdefault("component", record["extra"].get("name") or record["name"])


def setup_logging(
    level: str = "INFO",
    log_file: Optional[str] = None,
    colorize: bool = False,
    rotation: str = "50 MB",
    retention: str = "14 days",
):
    """
    Replace all loguru sinks with a stderr sink and an optional file sink.

    Args:
        level: Minimum level for both sinks
        log_file: Path of a rotating log file (compressed on rotation)
        colorize: Color console output
        rotation: File size or interval at which the log file rotates
        retention: How long rotated files are kept
    """
    logger.remove()
    logger.configure(patcher=_tag_component)
    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level, colorize=colorize, backtrace=False, diagnose=False)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        # enqueue: detector worker threads log concurrently
        logger.add(
            log_file,
            format=FILE_FORMAT,
            level=level,
            rotation=rotation,
            retention=retention,
            compression="gz",
            enqueue=True,
            colorize=False,
            diagnose=False,
        )
    return logger


def get_logger(name: Optional[str] = None):
    """Logger whose records are tagged with ``name``."""
    if name:
        return logger.bind(name=name)
    return logger


def configure_from_env():
    """Apply FLUXGATE_LOG_LEVEL and FLUXGATE_LOG_FILE."""
    return setup_logging(
        level=os.getenv("FLUXGATE_LOG_LEVEL", "INFO").upper(),
        log_file=os.getenv("FLUXGATE_LOG_FILE") or None,
        colorize=sys.stderr.isatty(),
    )


def configure_for_testing():
    """Warnings and errors only, no file sink."""
    return setup_logging(level="WARNING")


configure_from_env()


def setup_standard_logging_interception():
    """
    Route uvicorn and fastapi records from the standard logging module into loguru.
    """

    class LoguruHandler(logging.Handler):
        def emit(self, record):
            try:
                level = logger.level(record.levelname).name
            except ValueError:
                level = record.levelno

            frame, depth = sys._getframe(6), 6
            while frame and frame.f_code.co_filename == logging.__file__:
                frame = frame.f_back
                depth += 1

            logger.bind(name=record.name).opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())

    for logger_name in ("uvicorn", "uvicorn.access", "uvicorn.error", "fastapi"):
        std_logger = logging.getLogger(logger_name)
        std_logger.handlers = [LoguruHandler()]
        std_logger.propagate = False
