"""
Abstract base class for all trained classifiers.

Every model decides on scaled 8-vectors. Class -1 is fast-flux, +1 is
legitimate; a decision value of exactly 0 maps to -1.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from fluxgate.core.errors import EmptyTrainingSet, SingleClassData

FASTFLUX = -1
LEGITIMATE = 1


class BaseClassifier(ABC):
    """
    Base class for svm, mlp and rbfnet models.

    Subclasses implement:
    - kind: registry identifier
    - decision_function(): real-valued score, positive means legitimate
    - to_payload() / from_payload(): JSON-safe parameters for model files
    """

    @property
    @abstractmethod
    def kind(self) -> str:
        """Registry identifier ('svm', 'mlp', 'rbfnet')."""

    @abstractmethod
    def decision_function(self, X: np.ndarray) -> np.ndarray:
        """
        Score rows of X.

        Args:
            X: Scaled inputs, shape (n, 8) or (8,)

        Returns:
            Array of shape (n,)
        """

    @abstractmethod
    def to_payload(self) -> Dict[str, Any]:
        """Parameters as plain JSON types."""

    @classmethod
    @abstractmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "BaseClassifier":
        """Inverse of ``to_payload``."""

    def decide(self, x: np.ndarray) -> float:
        """Decision value of one input."""
        return float(self.decision_function(np.atleast_2d(x))[0])

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Labels in {-1, +1}; ties go to -1."""
        scores = self.decision_function(np.atleast_2d(X))
        return np.where(scores > 0, LEGITIMATE, FASTFLUX)

    def summary(self) -> Dict[str, Any]:
        """Short description for logs and the model endpoint."""
        return {"kind": self.kind}

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} kind='{self.kind}'>"


def check_training_data(X: np.ndarray, y: np.ndarray):
    """Validate shapes and labels; returns (X, y) as float matrix and int vector."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).astype(int).ravel()
    if X.shape[0] == 0 or y.size == 0:
        raise EmptyTrainingSet("no training examples")
    if X.shape[0] != y.size:
        raise ValueError(f"{X.shape[0]} rows but {y.size} labels")
    if not np.all(np.isin(y, (FASTFLUX, LEGITIMATE))):
        raise ValueError("labels must be -1 or +1")
    if np.unique(y).size < 2:
        raise SingleClassData(f"training data holds only label {int(y[0]):+d}")
    if not np.all(np.isfinite(X)):
        raise ValueError("training inputs must be finite")
    return X, y
