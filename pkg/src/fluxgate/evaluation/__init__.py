"""
Cross-validation, metrics, feature importance and grid search.
"""

from fluxgate.evaluation.cross_validation import kfold_split
from fluxgate.evaluation.grid_search import DEFAULT_GRIDS, GridSearchResult, grid_search
from fluxgate.evaluation.harness import EvaluationOptions, evaluate
from fluxgate.evaluation.importance import permutation_importance
from fluxgate.evaluation.metrics import ConfusionCounts, latency_stats
from fluxgate.evaluation.report import EvaluationReport, FoldResult, format_table

__all__ = [
    "DEFAULT_GRIDS",
    "ConfusionCounts",
    "EvaluationOptions",
    "EvaluationReport",
    "FoldResult",
    "GridSearchResult",
    "evaluate",
    "format_table",
    "grid_search",
    "kfold_split",
    "latency_stats",
    "permutation_importance",
]
