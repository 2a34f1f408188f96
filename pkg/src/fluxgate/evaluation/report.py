"""
Evaluation results: per fold, aggregated, as JSON and as a text table.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from fluxgate.classifiers.registry import get_classifier
from fluxgate.evaluation.metrics import ConfusionCounts
from fluxgate.features.vector import FEATURE_NAMES

TABLE_COLUMNS = ("Classifier", "Accuracy", "FPR", "FNR")

# Indexed by whether extraction ran inside the timed section.
LATENCY_SCOPES = ("scale+classify", "extract+scale+classify")


@dataclass
class FoldResult:
    """Outcome of one cross-validation fold; ``error`` is set when training failed."""

    fold: int
    train_size: int
    test_size: int
    confusion: ConfusionCounts = field(default_factory=ConfusionCounts)
    scaler: Optional[Dict[str, Any]] = None
    latencies_ms: List[float] = field(default_factory=list)
    importance: Optional[List[float]] = None
    error: Optional[str] = None
    train_ms: float = 0.0
    test_ms: float = 0.0

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "fold": self.fold,
            "train_size": self.train_size,
            "test_size": self.test_size,
            "failed": self.failed,
        }
        if self.failed:
            payload["error"] = self.error
        else:
            payload.update(
                {
                    "confusion": self.confusion.to_dict(),
                    "accuracy": self.confusion.accuracy,
                    "fpr": self.confusion.fpr,
                    "fnr": self.confusion.fnr,
                }
            )
        return payload


@dataclass
class EvaluationReport:
    """Cross-validated performance of one model kind and configuration."""

    model_kind: str
    config: Dict[str, Any]
    k: int
    seed: int
    folds: List[FoldResult]
    confusion: ConfusionCounts
    latency_ms: Dict[str, float]
    feature_importance: Optional[List[float]] = None
    latency_scope: str = LATENCY_SCOPES[0]
    train_ms: float = 0.0
    test_ms: float = 0.0

    @property
    def accuracy(self) -> float:
        return self.confusion.accuracy

    @property
    def fpr(self) -> float:
        return self.confusion.fpr

    @property
    def fnr(self) -> float:
        return self.confusion.fnr

    @property
    def failed_folds(self) -> List[int]:
        return [fold.fold for fold in self.folds if fold.failed]

    @property
    def label(self) -> str:
        name = get_classifier(self.model_kind).display_name
        if self.model_kind == "svm":
            return f"{name} ({self.config.get('kernel', 'rbf').upper()} kernel)"
        if self.model_kind == "rbfnet":
            return f"{name} ({self.config.get('rbf_activation', 'gaussian').capitalize()})"
        return name

    def metrics(self) -> Dict[str, Any]:
        """Deterministic part of the report (everything but latency)."""
        return {
            "accuracy": self.accuracy,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "confusion": self.confusion.to_dict(),
            "folds": [fold.to_dict() for fold in self.folds],
            "feature_importance": self._importance_dict(),
        }

    def _importance_dict(self) -> Optional[Dict[str, float]]:
        if self.feature_importance is None:
            return None
        return dict(zip(FEATURE_NAMES, self.feature_importance))

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "model_kind": self.model_kind,
            "classifier": self.label,
            "config": self.config,
            "k": self.k,
            "seed": self.seed,
            "failed_folds": self.failed_folds,
            "latency_ms": self.latency_ms,
            "latency_scope": self.latency_scope,
            "train_ms": self.train_ms,
            "test_ms": self.test_ms,
            "fold_times_ms": [
                {"fold": fold.fold, "train": fold.train_ms, "test": fold.test_ms} for fold in self.folds if not fold.failed
            ],
        }
        payload.update(self.metrics())
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def timing_summary(self) -> str:
        """Wall times per fold and per-record latency, one line."""
        return (
            f"train {self.train_ms:.1f} ms/fold, test {self.test_ms:.1f} ms/fold, "
            f"median {self.latency_ms.get('median', 0.0):.3f} ms/record ({self.latency_scope})"
        )

    def to_table(self) -> str:
        return format_table([self]) + "\n\n" + self.timing_summary()


def format_table(reports: Sequence[EvaluationReport], labels: Optional[Sequence[str]] = None) -> str:
    """Aligned text table with columns Classifier, Accuracy, FPR, FNR."""
    labels = list(labels) if labels is not None else [report.label for report in reports]
    rows = [TABLE_COLUMNS] + [
        (label, f"{r.accuracy:.3f}", f"{r.fpr:.3f}", f"{r.fnr:.3f}") for label, r in zip(labels, reports)
    ]
    widths = [max(len(row[col]) for row in rows) for col in range(len(TABLE_COLUMNS))]
    lines = []
    for index, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines)
