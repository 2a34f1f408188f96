"""
Environment-driven settings.

Values are read at call time so tests and long-running services pick up
changes made to the environment after import.
"""

import os
from typing import Optional

DEFAULT_GATE_THRESHOLD = 5
DEFAULT_MAX_IN_FLIGHT = 64


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


def worker_threads() -> int:
    """Size of the worker pool (FLUXGATE_THREADS)."""
    return _int_env("FLUXGATE_THREADS", min(8, os.cpu_count() or 1))


def gate_threshold() -> int:
    """Minimum number of A records for a suspicious domain (FLUXGATE_GATE_THRESHOLD)."""
    return _int_env("FLUXGATE_GATE_THRESHOLD", DEFAULT_GATE_THRESHOLD)


def max_in_flight() -> int:
    """Bound on records queued but not yet written by the stream server."""
    return _int_env("FLUXGATE_MAX_IN_FLIGHT", DEFAULT_MAX_IN_FLIGHT)


def model_path() -> Optional[str]:
    return os.getenv("FLUXGATE_MODEL_PATH")


def censys_db_path() -> Optional[str]:
    return os.getenv("FLUXGATE_CENSYS_DB")


def geo_db_path() -> Optional[str]:
    return os.getenv("FLUXGATE_GEO_DB")


def known_domains_path() -> Optional[str]:
    return os.getenv("FLUXGATE_KNOWN_DOMAINS")
