"""
Multilayer perceptron: sigmoid hidden layers, softmax over two classes.

Output index 0 is fast-flux, index 1 is legitimate. Training minimizes mean
cross-entropy with mini-batch gradient descent; an epoch that raises the
training loss is undone and retried at half the learning rate.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from fluxgate.classifiers.base import BaseClassifier, check_training_data
from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.kernels import sigmoid, softmax
from fluxgate.core.errors import DivergedLoss
from fluxgate.core.logging_config import get_logger

ACTIVATIONS = ("sigmoid", "softmax", "identity")
_LOG_FLOOR = 1e-300

logger = get_logger("mlp")


@dataclass
class Layer:
    """Affine map followed by an activation: f(a @ W + b)."""

    W: np.ndarray
    b: np.ndarray
    activation: str

    def __post_init__(self):
        self.W = np.atleast_2d(np.asarray(self.W, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.W.shape[1] != self.b.size:
            raise ValueError(f"weight shape {self.W.shape} does not match bias size {self.b.size}")

    def apply(self, a: np.ndarray) -> np.ndarray:
        z = a @ self.W + self.b
        if self.activation == "sigmoid":
            return sigmoid(z)
        if self.activation == "softmax":
            return softmax(z, axis=1)
        return z


class MlpModel(BaseClassifier):
    """A feed-forward network whose last layer is a 2-way softmax."""

    def __init__(self, layers: List[Layer], loss_history: Optional[List[float]] = None):
        if not layers:
            raise ValueError("an MLP needs at least one layer")
        for previous, current in zip(layers, layers[1:]):
            if previous.W.shape[1] != current.W.shape[0]:
                raise ValueError("consecutive layer dimensions do not match")
        if layers[-1].activation != "softmax" or layers[-1].W.shape[1] != 2:
            raise ValueError("the output layer must be a softmax over 2 classes")
        self.layers = layers
        self.loss_history = list(loss_history or [])

    @property
    def kind(self) -> str:
        return "mlp"

    @property
    def input_dim(self) -> int:
        return self.layers[0].W.shape[0]

    def forward(self, X: np.ndarray) -> np.ndarray:
        """Class probabilities, shape (n, 2)."""
        a = np.atleast_2d(np.asarray(X, dtype=float))
        for layer in self.layers:
            a = layer.apply(a)
        return a

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        probabilities = self.forward(X)
        return probabilities[:, 1] - probabilities[:, 0]

    def parameters(self) -> List[np.ndarray]:
        """Weight and bias arrays in layer order (live views, not copies)."""
        params = []
        for layer in self.layers:
            params.extend([layer.W, layer.b])
        return params

    def copy(self) -> "MlpModel":
        layers = [Layer(layer.W.copy(), layer.b.copy(), layer.activation) for layer in self.layers]
        return MlpModel(layers, self.loss_history)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "layers": [
                {"W": layer.W.tolist(), "b": layer.b.tolist(), "activation": layer.activation}
                for layer in self.layers
            ],
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "MlpModel":
        layers = [Layer(np.array(item["W"]), np.array(item["b"]), item["activation"]) for item in payload["layers"]]
        return cls(layers, payload.get("loss_history"))

    def summary(self) -> Dict[str, Any]:
        sizes = [self.input_dim] + [layer.W.shape[1] for layer in self.layers]
        return {"kind": self.kind, "layer_sizes": sizes, "epochs": len(self.loss_history)}

    def __repr__(self) -> str:
        sizes = "-".join(str(s) for s in self.summary()["layer_sizes"])
        return f"<MlpModel: {sizes}>"


def one_hot(y: np.ndarray) -> np.ndarray:
    """-1 -> [1, 0], +1 -> [0, 1]."""
    y = np.asarray(y).ravel()
    targets = np.zeros((y.size, 2))
    targets[np.arange(y.size), (y > 0).astype(int)] = 1.0
    return targets


def mlp_forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Probability vector for one input."""
    return model.forward(np.atleast_2d(x))[0]


def mlp_loss(model: MlpModel, X: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy of the network on (X, y)."""
    probabilities = model.forward(X)
    targets = one_hot(y)
    return float(-np.mean(np.sum(targets * np.log(np.maximum(probabilities, _LOG_FLOOR)), axis=1)))


def mlp_gradients(model: MlpModel, X: np.ndarray, y: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Analytic gradients of ``mlp_loss`` as (dW, db) per layer."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    activations = [X]
    for layer in model.layers:
        activations.append(layer.apply(activations[-1]))

    # softmax + cross-entropy
    delta = (activations[-1] - one_hot(y)) / X.shape[0]
    grads: List[Tuple[np.ndarray, np.ndarray]] = []
    for index in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[index]
        a_prev = activations[index]
        grads.append((a_prev.T @ delta, delta.sum(axis=0)))
        if index == 0:
            break
        delta = delta @ layer.W.T
        previous = model.layers[index - 1]
        if previous.activation == "sigmoid":
            delta = delta * activations[index] * (1.0 - activations[index])
        elif previous.activation == "softmax":
            raise ValueError("softmax is only supported on the output layer")
    grads.reverse()
    return grads


def init_network(sizes: List[int], rng: np.random.Generator) -> MlpModel:
    """Xavier-uniform weights, zero biases."""
    layers = []
    for index, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        activation = "softmax" if index == len(sizes) - 2 else "sigmoid"
        layers.append(Layer(W, np.zeros(fan_out), activation))
    return MlpModel(layers)


def mlp_train(X: np.ndarray, y: np.ndarray, cfg: Optional[TrainConfig] = None) -> MlpModel:
    """
    Train an MLP with mini-batch gradient descent.

    Args:
        X: Scaled inputs, shape (n, d)
        y: Labels in {-1, +1}
        cfg: Uses hidden_sizes, learning_rate, epochs, batch_size, seed

    Returns:
        Trained MlpModel with its per-epoch training loss history

    Raises:
        SingleClassData: Only one label present
        DivergedLoss: The loss stayed non-finite down to min_learning_rate
    """
    cfg = cfg or TrainConfig()
    X, y = check_training_data(X, y)
    rng = np.random.default_rng(cfg.seed)
    model = init_network([X.shape[1], *cfg.hidden_sizes, 2], rng)

    learning_rate = cfg.learning_rate
    best_loss = mlp_loss(model, X, y)
    history = [best_loss]
    n = y.size
    for epoch in range(1, cfg.epochs + 1):
        snapshot = model.copy()
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            for layer, (dW, db) in zip(model.layers, mlp_gradients(model, X[batch], y[batch])):
                layer.W -= learning_rate * dW
                layer.b -= learning_rate * db

        loss = mlp_loss(model, X, y)
        if np.isfinite(loss) and loss <= best_loss:
            best_loss = loss
            history.append(loss)
            continue

        model = snapshot
        learning_rate /= 2.0
        logger.debug(f"Epoch {epoch}: loss {loss} above {best_loss}, learning rate -> {learning_rate}")
        if learning_rate < cfg.min_learning_rate:
            if not np.isfinite(loss):
                raise DivergedLoss(epoch, float(loss))
            logger.info(f"Stopping at epoch {epoch}: learning rate fell below {cfg.min_learning_rate}")
            break

    model.loss_history = history
    logger.info(f"Trained {model!r}, final loss {best_loss:.6f}")
    return model
