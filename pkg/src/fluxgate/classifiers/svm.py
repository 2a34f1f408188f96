"""
Soft-margin support vector machine trained by sequential minimal optimization.

The dual problem

    maximize   J(a) = sum_k a_k - 1/2 sum_kl a_k a_l y_k y_l K(x_k, x_l)
    subject to 0 <= a_k <= C,  sum_k a_k y_k = 0

is solved two multipliers at a time. Each step picks the maximal violating
pair of the KKT conditions and moves it analytically along the equality
constraint, clipped to the box.
"""

from collections import OrderedDict
from typing import Any, Dict, Optional

import numpy as np

from fluxgate.classifiers.base import BaseClassifier, check_training_data
from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.kernels import Kernel
from fluxgate.core.logging_config import get_logger

# Training sets up to this size get a precomputed Gram matrix
FULL_GRAM_LIMIT = 3000
CACHED_COLUMNS = 1024
HARD_MARGIN_C = 1e6
_MIN_ETA = 1e-12
BOUND_EPS = 1e-12

logger = get_logger("svm")


class SvmModel(BaseClassifier):
    """
    A trained SVM keeping only multipliers a_k > 0.

    decision(x) = sum_k a_k y_k K(x_k, x) + bias
    """

    def __init__(
        self,
        support_vectors: np.ndarray,
        alphas: np.ndarray,
        labels: np.ndarray,
        bias: float,
        kernel: Kernel,
        C: float,
        support_indices: Optional[np.ndarray] = None,
        converged: bool = True,
        iterations: int = 0,
    ):
        self.support_vectors = np.atleast_2d(np.asarray(support_vectors, dtype=float))
        self.alphas = np.asarray(alphas, dtype=float)
        self.labels = np.asarray(labels, dtype=int)
        self.bias = float(bias)
        self.kernel = kernel
        self.C = float(C)
        if support_indices is None:
            support_indices = np.arange(self.alphas.size)
        self.support_indices = np.asarray(support_indices, dtype=int)
        self.converged = bool(converged)
        self.iterations = int(iterations)

    @property
    def kind(self) -> str:
        return "svm"

    @property
    def n_support(self) -> int:
        return int(self.alphas.size)

    @property
    def dual_coef(self) -> np.ndarray:
        return self.alphas * self.labels

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        K = self.kernel.matrix(np.atleast_2d(X), self.support_vectors)
        return K @ self.dual_coef + self.bias

    def primal_weights(self) -> np.ndarray:
        """w = sum_k a_k y_k x_k; meaningful for the linear kernel only."""
        if self.kernel.name != "linear":
            raise ValueError("primal weights exist only for the linear kernel")
        return self.dual_coef @ self.support_vectors

    def full_alphas(self, n_train: int) -> np.ndarray:
        """Multipliers over the whole training set (zeros for non-support vectors)."""
        alphas = np.zeros(n_train)
        alphas[self.support_indices] = self.alphas
        return alphas

    def to_payload(self) -> Dict[str, Any]:
        return {
            "kernel": self.kernel.to_dict(),
            "C": self.C,
            "bias": self.bias,
            "support_vectors": self.support_vectors.tolist(),
            "alphas": self.alphas.tolist(),
            "labels": self.labels.tolist(),
            "support_indices": self.support_indices.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "SvmModel":
        return cls(
            support_vectors=np.array(payload["support_vectors"], dtype=float),
            alphas=np.array(payload["alphas"], dtype=float),
            labels=np.array(payload["labels"], dtype=int),
            bias=payload["bias"],
            kernel=Kernel.from_dict(payload["kernel"]),
            C=payload["C"],
            support_indices=np.array(payload["support_indices"], dtype=int),
            converged=payload.get("converged", True),
            iterations=payload.get("iterations", 0),
        )

    def summary(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "kernel": self.kernel.name,
            "gamma": self.kernel.gamma,
            "C": self.C,
            "n_support": self.n_support,
            "converged": self.converged,
        }

    def __repr__(self) -> str:
        return f"<SvmModel: {self.kernel.name}, C={self.C}, {self.n_support} support vectors>"


class _KernelColumns:
    """Kernel columns K[:, t], from a full Gram matrix or an LRU column cache."""

    def __init__(self, X: np.ndarray, kernel: Kernel, cache_columns: int = CACHED_COLUMNS):
        self.X = X
        self.kernel = kernel
        self.cache_columns = cache_columns
        self._gram = kernel.gram(X) if len(X) <= FULL_GRAM_LIMIT else None
        self._cache: "OrderedDict[int, np.ndarray]" = OrderedDict()

    def diagonal(self) -> np.ndarray:
        if self._gram is not None:
            return np.diag(self._gram).copy()
        return self.kernel.diagonal(self.X)

    def __getitem__(self, t: int) -> np.ndarray:
        if self._gram is not None:
            return self._gram[t]
        column = self._cache.get(t)
        if column is not None:
            self._cache.move_to_end(t)
            return column
        column = self.kernel.matrix(self.X[t : t + 1], self.X)[0]
        self._cache[t] = column
        if len(self._cache) > self.cache_columns:
            self._cache.popitem(last=False)
        return column


def _bias(alphas: np.ndarray, y: np.ndarray, errors: np.ndarray, C: float) -> float:
    """Offset from free support vectors, or the midpoint of the feasible interval."""
    free = (alphas > 0) & (alphas < C)
    if free.any():
        return -float(np.mean(errors[free]))

    at_upper = alphas >= C
    upper_side = (at_upper & (y < 0)) | (~at_upper & (y > 0))
    lower_side = ~upper_side
    ub = float(np.min(errors[upper_side])) if upper_side.any() else np.inf
    lb = float(np.max(errors[lower_side])) if lower_side.any() else -np.inf
    if np.isinf(ub) or np.isinf(lb):
        rho = lb if np.isinf(ub) else ub
    else:
        rho = (ub + lb) / 2.0
    return -rho


def _working_sets(alphas: np.ndarray, positive: np.ndarray, C: float):
    """Index sets that may move up / down along the equality constraint."""
    below_c = alphas < C
    above_0 = alphas > 0
    up = (positive & below_c) | (~positive & above_0)
    low = (positive & above_0) | (~positive & below_c)
    return up, low


def _clip_pair(a_i: float, a_j: float, same_sign: bool, step: float, C: float):
    """
    Move a_j by ``step`` along sum_k a_k y_k = const and clip the pair to [0, C].

    Clipping assigns the boundary value itself, so a multiplier leaving the
    box lands exactly on 0 or C.
    """
    if same_sign:
        total = a_i + a_j
        a_i, a_j = a_i - step, a_j + step
        if total > C:
            if a_i > C:
                a_i, a_j = C, total - C
        elif a_j < 0:
            a_i, a_j = total, 0.0
        if total > C:
            if a_j > C:
                a_i, a_j = total - C, C
        elif a_i < 0:
            a_i, a_j = 0.0, total
    else:
        diff = a_i - a_j
        a_i, a_j = a_i + step, a_j + step
        if diff > 0:
            if a_j < 0:
                a_i, a_j = diff, 0.0
        elif a_i < 0:
            a_i, a_j = 0.0, -diff
        if diff > 0:
            if a_i > C:
                a_i, a_j = C, C - diff
        elif a_j > C:
            a_i, a_j = C + diff, C
    return a_i, a_j


def _snap(a: float, C: float) -> float:
    """Round multipliers within BOUND_EPS * C of a bound onto it."""
    eps = BOUND_EPS * C
    if a < eps:
        return 0.0
    if a > C - eps:
        return C
    return a


def svm_train(X: np.ndarray, y: np.ndarray, cfg: Optional[TrainConfig] = None) -> SvmModel:
    """
    Train a soft-margin SVM with SMO.

    Args:
        X: Scaled inputs, shape (n, d)
        y: Labels in {-1, +1}
        cfg: Uses C, the kernel fields, tolerance and max_passes

    Returns:
        SvmModel; ``converged`` is False when max_passes * n steps ran out,
        in which case the last iterate is returned

    Raises:
        SingleClassData: Only one label present
    """
    cfg = cfg or TrainConfig()
    X, y = check_training_data(X, y)
    kernel = Kernel.from_config(cfg)
    n = y.size
    yf = y.astype(float)
    C = float(cfg.C)

    columns = _KernelColumns(X, kernel)
    diagonal = columns.diagonal()
    alphas = np.zeros(n)
    # F[t] = sum_s a_s y_s K(x_s, x_t)
    F = np.zeros(n)
    positive = yf > 0
    # pairs that made no progress; cleared after the next successful step
    blocked = np.zeros(n, dtype=bool)

    max_iterations = cfg.max_passes * n
    converged = False
    iteration = 0
    while iteration < max_iterations:
        errors = F - yf
        up, low = _working_sets(alphas, positive, C)
        up_scores = np.where(up, -errors, -np.inf)
        low_scores = np.where(low, -errors, np.inf)
        if up_scores.max() - low_scores.min() <= cfg.tolerance:
            converged = True
            break

        i = int(np.argmax(np.where(blocked, -np.inf, up_scores)))
        j = int(np.argmin(np.where(blocked, np.inf, low_scores)))
        if blocked[i] or blocked[j] or up_scores[i] - low_scores[j] <= cfg.tolerance:
            logger.debug(f"SMO has no unblocked violating pair at step {iteration}")
            break

        K_i = columns[i]
        K_j = columns[j]
        eta = max(diagonal[i] + diagonal[j] - 2.0 * K_i[j], _MIN_ETA)
        step = yf[j] * (errors[i] - errors[j]) / eta
        new_a_i, new_a_j = _clip_pair(alphas[i], alphas[j], bool(yf[i] == yf[j]), step, C)
        new_a_i, new_a_j = _snap(new_a_i, C), _snap(new_a_j, C)
        delta_i = new_a_i - alphas[i]
        delta_j = new_a_j - alphas[j]
        iteration += 1
        if delta_i == 0.0 and delta_j == 0.0:
            logger.debug(f"SMO stalled at step {iteration} on pair ({i}, {j}); skipping it")
            blocked[i] = blocked[j] = True
            continue

        if blocked.any():
            blocked[:] = False
        alphas[i] = new_a_i
        alphas[j] = new_a_j
        F += delta_i * yf[i] * K_i + delta_j * yf[j] * K_j

    if not converged:
        logger.warning(
            f"SMO did not converge within {max_iterations} steps "
            f"(C={C}, kernel={kernel.name}); returning last iterate"
        )

    bias = _bias(alphas, yf, F - yf, C)
    support = np.flatnonzero(alphas > 0)
    model = SvmModel(
        support_vectors=X[support],
        alphas=alphas[support],
        labels=y[support],
        bias=bias,
        kernel=kernel,
        C=C,
        support_indices=support,
        converged=converged,
        iterations=iteration,
    )
    logger.info(f"Trained {model!r} in {iteration} steps")
    return model


def svm_decision(model: SvmModel, x: np.ndarray) -> float:
    """sum_k a_k y_k K(x_k, x) + b for one input."""
    return model.decide(x)


def hard_margin_train(
    X: np.ndarray,
    y: np.ndarray,
    kernel: str = "linear",
    gamma: float = 1.0,
    tolerance: float = 1e-6,
) -> SvmModel:
    """Approximate a hard-margin SVM on separable data with a very large C."""
    cfg = TrainConfig(C=HARD_MARGIN_C, gamma=gamma, kernel=kernel, tolerance=tolerance, max_passes=1000)
    return svm_train(X, y, cfg)


def geometric_margin(model: SvmModel, X: np.ndarray, y: np.ndarray) -> float:
    """Half the gap between the classes along the linear model's normal."""
    w = model.primal_weights()
    projections = np.atleast_2d(X) @ w
    y = np.asarray(y)
    gap = projections[y > 0].min() - projections[y < 0].max()
    return float(gap / (2.0 * np.linalg.norm(w)))


def dual_objective(alphas: np.ndarray, X: np.ndarray, y: np.ndarray, kernel: Kernel) -> float:
    """J(a) = sum(a) - 1/2 (a*y)^T K (a*y)."""
    coef = np.asarray(alphas, dtype=float) * np.asarray(y, dtype=float)
    K = kernel.gram(np.atleast_2d(np.asarray(X, dtype=float)))
    return float(np.sum(alphas) - 0.5 * coef @ K @ coef)
