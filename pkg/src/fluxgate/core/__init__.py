"""
fluxgate core: logging, errors and environment settings.
"""

from fluxgate.core.errors import DataError, FluxgateError, TrainingError

__all__ = ["DataError", "FluxgateError", "TrainingError"]
