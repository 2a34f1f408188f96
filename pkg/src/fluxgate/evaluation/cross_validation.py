"""Stratified k-fold splitting on top of scikit-learn's splitters."""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import KFold, StratifiedKFold

from fluxgate.core.errors import TooFewExamples
from fluxgate.core.logging_config import get_logger

logger = get_logger("cross_validation")

Fold = Tuple[np.ndarray, np.ndarray]


def kfold_split(n: int, k: int = 10, seed: int = 0, labels: Optional[Sequence[int]] = None) -> List[Fold]:
    """
    Split range(n) into k shuffled (train, test) index pairs.

    Test folds are disjoint, cover every index and differ in size by at
    most one. With ``labels`` the folds are stratified, holding each class
    in proportion to within one example; when some class has fewer than k
    members it cannot reach every fold and a plain shuffled split is used.
    Index arrays come back sorted.

    Args:
        n: Number of examples
        k: Number of folds (>= 2)
        seed: Shuffle seed
        labels: Optional per-example labels to stratify on

    Raises:
        TooFewExamples: n < k
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if n < k:
        raise TooFewExamples(f"{n} examples cannot fill {k} folds")

    placeholder = np.zeros((n, 1))
    if labels is not None:
        labels = np.asarray(labels)
        if labels.size != n:
            raise ValueError(f"{labels.size} labels for {n} examples")
        _, counts = np.unique(labels, return_counts=True)
        if counts.min() < k:
            logger.debug(f"Smallest class has {counts.min()} examples for {k} folds; splitting without strata")
            labels = None

    if labels is None:
        splits = KFold(n_splits=k, shuffle=True, random_state=seed).split(placeholder)
    else:
        splits = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed).split(placeholder, labels)
    return [(np.sort(train), np.sort(test)) for train, test in splits]
