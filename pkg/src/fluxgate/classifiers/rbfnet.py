"""
Radial basis function network.

Hidden unit j responds with exp(-||x - c_j||^2 / r_j^2) (or the normalized,
softmax form of those responses); outputs are linear in the hidden layer.
Centers come from k-means++, radii from the distance to the nearest other
center, and output weights from ridge-regularized least squares.
"""

from typing import Any, Dict, Optional, Tuple

import numpy as np

from fluxgate.classifiers.base import BaseClassifier, check_training_data
from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.kernels import softmax, squared_distances
from fluxgate.classifiers.mlp import one_hot
from fluxgate.core.errors import DegenerateCenters, NonPositiveRadius
from fluxgate.core.logging_config import get_logger

KMEANS_MAX_ITERATIONS = 100

logger = get_logger("rbfnet")


class RbfNetModel(BaseClassifier):
    """
    Centers, radii and output weights of a trained RBF network.

    ``weights`` has shape (n_centers, n_outputs). With two outputs the
    decision value is out[1] - out[0] (legitimate minus fast-flux).
    """

    def __init__(
        self,
        centers: np.ndarray,
        radii: np.ndarray,
        weights: np.ndarray,
        activation: str = "gaussian",
    ):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.radii = np.asarray(radii, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float)
        self.weights = weights.reshape(-1, 1) if weights.ndim == 1 else weights
        self.activation = activation

        if activation not in ("gaussian", "softmax"):
            raise ValueError(f"unknown hidden activation {activation!r}")
        if np.any(self.radii <= 0):
            raise NonPositiveRadius("every radius must be positive")
        if not (len(self.centers) == self.radii.size == self.weights.shape[0]):
            raise ValueError("centers, radii and weight rows must have equal counts")

    @property
    def kind(self) -> str:
        return "rbfnet"

    def hidden(self, X: np.ndarray) -> np.ndarray:
        """Hidden-layer responses, shape (n, n_centers)."""
        logits = -squared_distances(X, self.centers) / (self.radii**2)
        if self.activation == "softmax":
            return softmax(logits, axis=1)
        return np.exp(logits)

    def forward(self, X: np.ndarray) -> np.ndarray:
        """Identity-output network response, shape (n, n_outputs)."""
        return self.hidden(X) @ self.weights

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        out = self.forward(np.atleast_2d(X))
        if out.shape[1] == 2:
            return out[:, 1] - out[:, 0]
        return out[:, 0]

    def to_payload(self) -> Dict[str, Any]:
        return {
            "centers": self.centers.tolist(),
            "radii": self.radii.tolist(),
            "weights": self.weights.tolist(),
            "activation": self.activation,
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "RbfNetModel":
        return cls(
            centers=np.array(payload["centers"], dtype=float),
            radii=np.array(payload["radii"], dtype=float),
            weights=np.array(payload["weights"], dtype=float),
            activation=payload.get("activation", "gaussian"),
        )

    def summary(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n_centers": len(self.centers), "activation": self.activation}

    def __repr__(self) -> str:
        return f"<RbfNetModel: {len(self.centers)} {self.activation} centers>"


def kmeans(X: np.ndarray, k: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    k-means++ seeding followed by Lloyd iterations.

    Returns:
        (centers, assignments)

    Raises:
        DegenerateCenters: A cluster emptied or seeding ran out of distinct points
    """
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = squared_distances(X, centers[:1])[:, 0]
    for index in range(1, k):
        total = closest.sum()
        if total <= 0:
            raise DegenerateCenters(f"only {index} distinct points available for {k} centers")
        centers[index] = X[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, squared_distances(X, centers[index : index + 1])[:, 0])

    assignments = np.full(n, -1)
    for _ in range(KMEANS_MAX_ITERATIONS):
        new_assignments = np.argmin(squared_distances(X, centers), axis=1)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        counts = np.bincount(assignments, minlength=k)
        if np.any(counts == 0):
            raise DegenerateCenters(f"{int(np.sum(counts == 0))} empty clusters")
        for index in range(k):
            centers[index] = X[assignments == index].mean(axis=0)
    return centers, assignments


def center_radii(X: np.ndarray, centers: np.ndarray, assignments: np.ndarray) -> np.ndarray:
    """Distance from each center to its nearest other center."""
    if len(centers) == 1:
        rms = float(np.sqrt(np.mean(squared_distances(X, centers)[:, 0])))
        return np.array([rms if rms > 0 else 1.0])
    distances = squared_distances(centers, centers)
    np.fill_diagonal(distances, np.inf)
    radii = np.sqrt(distances.min(axis=1))
    if np.any(radii <= 0):
        raise DegenerateCenters("two centers coincide")
    return radii


def rbfnet_train(X: np.ndarray, y: np.ndarray, cfg: Optional[TrainConfig] = None) -> RbfNetModel:
    """
    Train an RBF network.

    Args:
        X: Scaled inputs, shape (n, d)
        y: Labels in {-1, +1}
        cfg: Uses n_centers, rbf_activation, ridge, seed, max_restarts

    Raises:
        SingleClassData: Only one label present
        DegenerateCenters: k-means kept collapsing after max_restarts reseeds
    """
    cfg = cfg or TrainConfig()
    X, y = check_training_data(X, y)
    n_centers = min(cfg.n_centers, np.unique(X, axis=0).shape[0])

    last_error: Optional[DegenerateCenters] = None
    for attempt in range(cfg.max_restarts + 1):
        rng = np.random.default_rng(cfg.seed + attempt)
        try:
            centers, assignments = kmeans(X, n_centers, rng)
            radii = center_radii(X, centers, assignments)
            break
        except DegenerateCenters as exc:
            last_error = exc
            logger.warning(f"k-means attempt {attempt + 1} degenerate ({exc}); reseeding")
    else:
        raise DegenerateCenters(f"gave up after {cfg.max_restarts + 1} attempts: {last_error}")

    model = RbfNetModel(centers, radii, np.zeros((n_centers, 2)), cfg.rbf_activation)
    H = model.hidden(X)
    gram = H.T @ H + cfg.ridge * np.eye(n_centers)
    model.weights = np.linalg.solve(gram, H.T @ one_hot(y))
    logger.info(f"Trained {model!r}")
    return model


def rbfnet_forward(model: RbfNetModel, x: np.ndarray) -> np.ndarray:
    """Network outputs for one input."""
    return model.forward(np.atleast_2d(x))[0]
