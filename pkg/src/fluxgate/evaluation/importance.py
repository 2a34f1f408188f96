"""Permutation feature importance."""

import numpy as np

from fluxgate.classifiers.base import BaseClassifier
from fluxgate.core.errors import EmptyTrainingSet
from fluxgate.evaluation.metrics import accuracy_fraction


def permutation_importance(
    model: BaseClassifier,
    X: np.ndarray,
    y: np.ndarray,
    repeats: int = 5,
    seed: int = 0,
) -> np.ndarray:
    """
    Normalized accuracy drop when each feature column is shuffled.

    The mean drop over ``repeats`` shuffles is floored at 0, then the
    weights are normalized to sum to 1. When no feature matters every
    weight is equal.

    Args:
        model: Trained classifier
        X: Held-out scaled inputs
        y: Held-out labels
        repeats: Shuffles per feature
        seed: Shuffle seed

    Returns:
        One weight per feature
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y)
    if X.shape[0] == 0:
        raise EmptyTrainingSet("permutation importance needs held-out examples")
    if repeats < 1:
        raise ValueError(f"repeats must be positive, got {repeats}")

    rng = np.random.default_rng(seed)
    baseline = accuracy_fraction(y, model.predict(X))
    n_features = X.shape[1]
    drops = np.zeros(n_features)
    for feature in range(n_features):
        shuffled = X.copy()
        total = 0.0
        for _ in range(repeats):
            shuffled[:, feature] = X[rng.permutation(X.shape[0]), feature]
            total += baseline - accuracy_fraction(y, model.predict(shuffled))
        drops[feature] = max(total / repeats, 0.0)

    if drops.sum() <= 0:
        return np.full(n_features, 1.0 / n_features)
    return drops / drops.sum()
