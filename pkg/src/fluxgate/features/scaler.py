"""
Per-feature scaling fitted on training data.

MinMax maps the training range onto [0, 1] and clamps values outside it;
ZScore centers and divides by the standard deviation without clamping.
Both are scikit-learn estimators; the fitted statistics are kept as plain
arrays so a scaler can be saved inside a model file. Features that were
constant during fitting always scale to 0.
"""

from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from sklearn.preprocessing import MinMaxScaler, StandardScaler

from fluxgate.core.errors import DataError, EmptyTrainingSet, UnfittedScaler
from fluxgate.features.vector import N_FEATURES, FeatureVector


class ScalingMode(str, Enum):
    MINMAX = "minmax"
    ZSCORE = "zscore"


VectorsLike = Union[np.ndarray, Sequence[FeatureVector], Sequence[Sequence[float]]]


def as_matrix(vectors: VectorsLike) -> np.ndarray:
    """Stack feature vectors (or raw rows) into an (n, 8) float matrix."""
    if isinstance(vectors, np.ndarray):
        matrix = np.asarray(vectors, dtype=float)
    else:
        matrix = np.array(
            [v.as_array() if isinstance(v, FeatureVector) else np.asarray(v, dtype=float) for v in vectors],
            dtype=float,
        )
    if matrix.size == 0:
        return matrix.reshape(0, N_FEATURES)
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.shape[1] != N_FEATURES:
        raise DataError(f"expected {N_FEATURES} features per row, got {matrix.shape[1]}")
    return matrix


class Scaler:
    """Fitted per-feature statistics; immutable once fitted."""

    def __init__(self, mode: Union[ScalingMode, str] = ScalingMode.MINMAX):
        self.mode = ScalingMode(mode)
        self.low: Optional[np.ndarray] = None
        self.high: Optional[np.ndarray] = None
        self.constant: Optional[np.ndarray] = None
        self._estimator: Optional[Union[MinMaxScaler, StandardScaler]] = None

    @property
    def fitted(self) -> bool:
        return self._estimator is not None

    def _new_estimator(self) -> Union[MinMaxScaler, StandardScaler]:
        if self.mode is ScalingMode.MINMAX:
            return MinMaxScaler(clip=True)
        return StandardScaler()

    def fit(self, vectors: VectorsLike) -> "Scaler":
        """Compute statistics; ``low/high`` hold (min, max) or (mean, scale) by mode."""
        X = as_matrix(vectors)
        if X.shape[0] == 0:
            raise EmptyTrainingSet("cannot fit a scaler on zero vectors")
        estimator = self._new_estimator().fit(X)
        if self.mode is ScalingMode.MINMAX:
            self.low, self.high = estimator.data_min_, estimator.data_max_
        else:
            self.low, self.high = estimator.mean_, estimator.scale_
        self.constant = X.max(axis=0) <= X.min(axis=0)
        self._estimator = estimator
        return self

    def _require_fitted(self):
        if not self.fitted:
            raise UnfittedScaler("scaler must be fitted before use")

    def transform(self, vectors: VectorsLike) -> np.ndarray:
        self._require_fitted()
        X = as_matrix(vectors)
        if X.shape[0] == 0:
            return X
        return np.where(self.constant, 0.0, self._estimator.transform(X))

    def transform_one(self, vector: Union[FeatureVector, Sequence[float]]) -> np.ndarray:
        return self.transform([vector])[0]

    def inverse_transform(self, scaled: np.ndarray) -> np.ndarray:
        """Map scaled values back; constant features return their fitted value."""
        self._require_fitted()
        Z = np.atleast_2d(np.asarray(scaled, dtype=float))
        return np.where(self.constant, self.low, self._estimator.inverse_transform(Z))

    def to_dict(self) -> dict:
        self._require_fitted()
        return {
            "mode": self.mode.value,
            "low": self.low.tolist(),
            "high": self.high.tolist(),
            "constant": [bool(c) for c in self.constant],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Scaler":
        try:
            scaler = cls(payload["mode"])
            low = np.array(payload["low"], dtype=float)
            high = np.array(payload["high"], dtype=float)
            constant = np.array(payload["constant"], dtype=bool)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"invalid scaler payload: {exc}") from exc
        if not (low.shape == high.shape == constant.shape == (N_FEATURES,)):
            raise DataError("scaler payload must hold 8 values per statistic")
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(high))):
            raise DataError("scaler payload holds non-finite statistics")
        scaler._restore(low, high, constant)
        return scaler

    def _restore(self, low: np.ndarray, high: np.ndarray, constant: np.ndarray):
        if self.mode is ScalingMode.MINMAX:
            # min and max of these two rows are exactly low and high
            estimator = self._new_estimator().fit(np.vstack([low, high]))
        else:
            estimator = self._new_estimator().fit(np.vstack([low, low]))
            estimator.mean_ = low
            estimator.scale_ = np.where(high > 0, high, 1.0)
            estimator.var_ = high**2
        self.low, self.high, self.constant = low, high, constant
        self._estimator = estimator

    def __repr__(self) -> str:
        state = "fitted" if self.fitted else "unfitted"
        return f"<Scaler: {self.mode.value}, {state}>"


def fit_scaler(vectors: VectorsLike, mode: Union[ScalingMode, str] = ScalingMode.MINMAX) -> Scaler:
    """
    Fit a scaler on training vectors.

    Raises:
        EmptyTrainingSet: vectors is empty
    """
    return Scaler(mode).fit(vectors)


def apply_scaler(scaler: Scaler, vector: Union[FeatureVector, Sequence[float]]) -> np.ndarray:
    """
    Scale one vector.

    Raises:
        UnfittedScaler: The scaler was never fitted
    """
    return scaler.transform_one(vector)
