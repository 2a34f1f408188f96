"""Exhaustive hyperparameter search by cross-validation."""

import itertools
from dataclasses import dataclass, fields
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from fluxgate.classifiers.config import TrainConfig
from fluxgate.core.logging_config import get_logger
from fluxgate.evaluation.harness import EvaluationOptions, RowExtractor, evaluate
from fluxgate.evaluation.report import EvaluationReport, format_table

logger = get_logger("grid_search")

Grid = Mapping[str, Sequence[Any]]

TUNABLE_FIELDS = frozenset(f.name for f in fields(TrainConfig))

DEFAULT_GRIDS: Dict[str, Dict[str, List[Any]]] = {
    "svm": {"C": [0.1, 1.0, 10.0, 100.0], "gamma": [0.01, 0.1, 1.0, 10.0]},
    "mlp": {"learning_rate": [0.05, 0.1, 0.5], "hidden_sizes": [(8,), (16,)]},
    "rbfnet": {"n_centers": [10, 20, 40], "rbf_activation": ["gaussian", "softmax"]},
}


@dataclass
class GridSearchResult:
    best_config: TrainConfig
    best_report: EvaluationReport
    entries: List[Tuple[Dict[str, Any], EvaluationReport]]

    def to_table(self) -> str:
        labels = [", ".join(f"{k}={v}" for k, v in params.items()) for params, _ in self.entries]
        return format_table([report for _, report in self.entries], labels)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_config": self.best_config.to_dict(),
            "best": self.best_report.to_dict(),
            "grid": [
                {"params": _jsonable(params), "accuracy": r.accuracy, "fpr": r.fpr, "fnr": r.fnr}
                for params, r in self.entries
            ],
        }


def _jsonable(params: Dict[str, Any]) -> Dict[str, Any]:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}


def expand_grid(grid: Grid) -> List[Dict[str, Any]]:
    """Every combination of the grid's values, in key order."""
    if not grid or any(len(values) == 0 for values in grid.values()):
        raise ValueError("grid must name at least one parameter, each with at least one value")
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def check_grid(grid: Grid, base: Optional[TrainConfig] = None) -> List[TrainConfig]:
    """
    Validate a grid and build the configuration of every point.

    Raises:
        ValueError: The grid is not a mapping of TrainConfig fields to value
            lists, or a point gives an invalid configuration
    """
    if not isinstance(grid, Mapping):
        raise ValueError(f"grid must map parameter names to value lists, got {type(grid).__name__}")
    unknown = sorted(set(grid) - TUNABLE_FIELDS)
    if unknown:
        raise ValueError(f"unknown grid parameter(s) {unknown}; expected fields of TrainConfig")
    for key, values in grid.items():
        if isinstance(values, (str, bytes)) or not isinstance(values, Sequence):
            raise ValueError(f"grid values for {key!r} must be a list")
    base = base or TrainConfig()
    configs = []
    for params in expand_grid(grid):
        try:
            configs.append(base.with_overrides(**params))
        except TypeError as exc:
            raise ValueError(f"invalid grid point {params}: {exc}") from exc
    return configs


def _rank(entry: Tuple[Dict[str, Any], EvaluationReport, TrainConfig]):
    _, report, cfg = entry
    return (-report.accuracy, report.fnr, cfg.C)


def grid_search(
    X: np.ndarray,
    y: np.ndarray,
    model_kind: str,
    grid: Optional[Grid] = None,
    base: Optional[TrainConfig] = None,
    options: Optional[EvaluationOptions] = None,
    extract_row: Optional[RowExtractor] = None,
) -> GridSearchResult:
    """
    Cross-validate every grid point and pick the best.

    The best point has the highest accuracy; ties go to the lower FNR, then
    to the lower C.

    Args:
        grid: TrainConfig field -> candidate values (default grid of the kind if None)
        base: Configuration the grid values override
    """
    grid = grid if grid is not None else DEFAULT_GRIDS[model_kind]
    base = base or TrainConfig()
    points = expand_grid(grid)
    configs = check_grid(grid, base)
    logger.info(f"Grid search over {len(points)} {model_kind} configurations")

    scored = []
    for params, cfg in zip(points, configs):
        report = evaluate(X, y, model_kind, cfg, options, extract_row=extract_row)
        scored.append((params, report, cfg))

    best_params, best_report, best_cfg = min(scored, key=_rank)
    logger.success(f"Best {model_kind} configuration: {best_params} ({best_report.accuracy:.3f}%)")
    return GridSearchResult(
        best_config=best_cfg,
        best_report=best_report,
        entries=[(params, report) for params, report, _ in scored],
    )
