"""
Exception hierarchy for fluxgate.

Every error carries the CLI exit code it maps to, so the command layer
can translate failures without knowing where they came from.
"""

from typing import Optional


class FluxgateError(Exception):
    """Base class for all fluxgate errors."""

    exit_code = 2


# ---------------------------------------------------------------------------
# Data errors (exit code 2)
# ---------------------------------------------------------------------------


class DataError(FluxgateError):
    """Input data could not be used."""

    exit_code = 2


class MalformedRecord(DataError):
    """A DNS record is truncated, invalid, or missing required fields."""


class NoARecords(DataError):
    """A DNS response carries no usable A records."""


class MalformedLine(DataError):
    """A snapshot or range file line does not match its schema."""

    def __init__(self, line_number: int, reason: str = ""):
        self.line_number = line_number
        self.reason = reason
        message = f"malformed line {line_number}"
        if reason:
            message += f": {reason}"
        super().__init__(message)


class OverlappingRanges(DataError):
    """Two geolocation ranges cover a common address."""

    def __init__(self, a, b):
        self.a = a
        self.b = b
        super().__init__(f"overlapping ranges: {a} and {b}")


class EmptyQuery(DataError):
    """A store lookup was called with no addresses."""


class InconsistentInputs(DataError):
    """Observation and store lookups disagree on the number of addresses."""


class EmptyTrainingSet(DataError):
    """A scaler or model was asked to fit on no data."""


class TooFewExamples(DataError):
    """Not enough examples to build the requested folds."""


class InvalidDistribution(DataError):
    """A synthetic corpus configuration cannot produce valid records."""


class ModelFileError(DataError):
    """A model file cannot be read."""


class VersionMismatch(ModelFileError):
    """A model file was written by an incompatible format version."""

    def __init__(self, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"model format version {found}, expected {expected}")


class CorruptModel(ModelFileError):
    """A model file is truncated or fails its checksum."""


# ---------------------------------------------------------------------------
# Misuse of fitted objects
# ---------------------------------------------------------------------------


class UnfittedScaler(FluxgateError):
    """A scaler was applied before being fitted."""


class NonPositiveRadius(FluxgateError, ValueError):
    """A Gaussian basis function was given a radius <= 0."""


# ---------------------------------------------------------------------------
# Training errors (exit code 3)
# ---------------------------------------------------------------------------


class TrainingError(FluxgateError):
    """Model training failed."""

    exit_code = 3


class SingleClassData(TrainingError):
    """Training data contains only one label."""


class DivergedLoss(TrainingError):
    """Training loss became NaN or infinite."""

    def __init__(self, epoch: int, loss: Optional[float] = None):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"loss diverged at epoch {epoch} (loss={loss})")


class DegenerateCenters(TrainingError):
    """k-means produced collapsed or empty centers."""
