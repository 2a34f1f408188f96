"""
Confusion counts and latency statistics.

The positive class is fast-flux (-1): FPR is the share of legitimate
domains flagged, FNR the share of fast-flux domains missed.
"""

from dataclasses import asdict, dataclass
from typing import Dict, Sequence

import numpy as np
from sklearn.metrics import confusion_matrix

from fluxgate.classifiers.base import FASTFLUX, LEGITIMATE


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @classmethod
    def from_predictions(cls, y_true: Sequence[int], y_pred: Sequence[int]) -> "ConfusionCounts":
        y_true = np.asarray(y_true)
        if y_true.size == 0:
            return cls()
        # rows are true labels, columns predictions, fast-flux first
        (tp, fn), (fp, tn) = confusion_matrix(y_true, np.asarray(y_pred), labels=[FASTFLUX, LEGITIMATE])
        return cls(tp=int(tp), tn=int(tn), fp=int(fp), fn=int(fn))

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn
        )

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        """Percentage of correct decisions."""
        return 100.0 * (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def fpr(self) -> float:
        negatives = self.fp + self.tn
        return self.fp / negatives if negatives else 0.0

    @property
    def fnr(self) -> float:
        positives = self.fn + self.tp
        return self.fn / positives if positives else 0.0

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def accuracy_fraction(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    y_true = np.asarray(y_true)
    return float(np.mean(y_true == np.asarray(y_pred))) if y_true.size else 0.0


def latency_stats(latencies_ms: Sequence[float]) -> Dict[str, float]:
    """mean, median and p95 of per-record latencies (zeros when empty)."""
    values = np.asarray(latencies_ms, dtype=float)
    if values.size == 0:
        return {"count": 0, "mean": 0.0, "median": 0.0, "p95": 0.0}
    return {
        "count": int(values.size),
        "mean": float(values.mean()),
        "median": float(np.median(values)),
        "p95": float(np.percentile(values, 95)),
    }
