"""
Cross-validation harness.

For each fold the scaler is fitted on the training rows only, a model of the
requested kind is trained through the registry, and the held-out rows are
scored one at a time so that per-record latency can be reported.

Given an ``extract_row`` callable, each held-out record is re-extracted from
its observation inside the timed section, so latency covers extraction
against warm stores, scaling and the decision. Without it only scaling and
the decision are timed.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.registry import train_classifier
from fluxgate.core.errors import SingleClassData, TrainingError
from fluxgate.core.logging_config import get_logger
from fluxgate.core.settings import worker_threads
from fluxgate.evaluation.cross_validation import kfold_split
from fluxgate.evaluation.importance import permutation_importance
from fluxgate.evaluation.metrics import ConfusionCounts, latency_stats
from fluxgate.evaluation.report import LATENCY_SCOPES, EvaluationReport, FoldResult
from fluxgate.features.scaler import ScalingMode, fit_scaler
from fluxgate.features.vector import FeatureVector

logger = get_logger("evaluation")

RowExtractor = Callable[[int], Union[FeatureVector, Sequence[float]]]


@dataclass(frozen=True)
class EvaluationOptions:
    """How folds are built and scored."""

    k: int = 10
    seed: int = 0
    scaling: ScalingMode = ScalingMode.MINMAX
    importance_repeats: int = 3
    workers: Optional[int] = None


def _run_fold(
    fold: int,
    train: np.ndarray,
    test: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    model_kind: str,
    cfg: TrainConfig,
    options: EvaluationOptions,
    extract_row: Optional[RowExtractor] = None,
) -> FoldResult:
    result = FoldResult(fold=fold, train_size=int(train.size), test_size=int(test.size))
    scaler = fit_scaler(X[train], options.scaling)
    result.scaler = scaler.to_dict()
    train_started = time.perf_counter()
    try:
        model = train_classifier(model_kind, scaler.transform(X[train]), y[train], cfg)
    except TrainingError as exc:
        result.error = f"{type(exc).__name__}: {exc}"
        logger.warning(f"Fold {fold} failed: {result.error}")
        return result
    result.train_ms = (time.perf_counter() - train_started) * 1000.0

    predictions = np.empty(test.size, dtype=int)
    latencies = []
    test_started = time.perf_counter()
    for position, index in enumerate(test):
        started = time.perf_counter()
        row = extract_row(int(index)) if extract_row is not None else X[index]
        scaled = scaler.transform_one(row)
        predictions[position] = model.predict(scaled)[0]
        latencies.append((time.perf_counter() - started) * 1000.0)
    result.test_ms = (time.perf_counter() - test_started) * 1000.0

    result.confusion = ConfusionCounts.from_predictions(y[test], predictions)
    result.latencies_ms = latencies
    if options.importance_repeats > 0:
        weights = permutation_importance(
            model,
            scaler.transform(X[test]),
            y[test],
            repeats=options.importance_repeats,
            seed=options.seed + fold,
        )
        result.importance = weights.tolist()
    logger.debug(f"Fold {fold}: accuracy {result.confusion.accuracy:.3f}%")
    return result


def evaluate(
    X: np.ndarray,
    y: np.ndarray,
    model_kind: str,
    cfg: Optional[TrainConfig] = None,
    options: Optional[EvaluationOptions] = None,
    extract_row: Optional[RowExtractor] = None,
) -> EvaluationReport:
    """
    k-fold cross-validation of one model kind and configuration.

    Folds may run concurrently; results are reduced in fold order. Folds
    whose training fails are excluded from the aggregate and listed in the
    report.

    Args:
        X: Unscaled feature matrix, shape (n, 8)
        y: Labels in {-1, +1}
        model_kind: Registered classifier kind
        cfg: Training configuration (defaults if None)
        options: Fold count, seed, scaling mode, importance repeats, workers
        extract_row: Row index -> feature vector, recomputed from the
            original observation; must agree with X[index]

    Raises:
        SingleClassData: Only one label present
        TooFewExamples: Fewer examples than folds
        TrainingError: Every fold failed
    """
    cfg = cfg or TrainConfig()
    options = options or EvaluationOptions()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).astype(int)
    if np.unique(y).size < 2:
        raise SingleClassData("evaluation needs both labels")

    folds = kfold_split(y.size, options.k, options.seed, labels=y)
    workers = options.workers or worker_threads()
    logger.info(f"Evaluating {model_kind} with {options.k} folds on {y.size} examples ({workers} workers)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_fold, index, train, test, X, y, model_kind, cfg, options, extract_row)
            for index, (train, test) in enumerate(folds)
        ]
        results = [future.result() for future in futures]

    completed = [result for result in results if not result.failed]
    if not completed:
        raise TrainingError(f"all {options.k} folds failed for {model_kind}")

    confusion = ConfusionCounts()
    latencies = []
    for result in completed:
        confusion = confusion + result.confusion
        latencies.extend(result.latencies_ms)

    importance = None
    if options.importance_repeats > 0:
        mean = np.mean([result.importance for result in completed], axis=0)
        importance = (mean / mean.sum()).tolist()

    report = EvaluationReport(
        model_kind=model_kind,
        config=cfg.to_dict(),
        k=options.k,
        seed=options.seed,
        folds=results,
        confusion=confusion,
        latency_ms=latency_stats(latencies),
        feature_importance=importance,
        latency_scope=LATENCY_SCOPES[extract_row is not None],
        train_ms=float(np.mean([result.train_ms for result in completed])),
        test_ms=float(np.mean([result.test_ms for result in completed])),
    )
    logger.success(
        f"{report.label}: accuracy {report.accuracy:.3f}%, FPR {report.fpr:.4f}, FNR {report.fnr:.4f}"
    )
    return report
