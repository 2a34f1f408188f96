"""
Activation and kernel functions.

All kernels compute k(x1, x2) directly; feature maps are never built.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from fluxgate.core.errors import NonPositiveRadius

ArrayLike = Union[np.ndarray, float]


def softmax(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Overflow-safe softmax (max-subtracted) along ``axis``."""
    a = np.asarray(a, dtype=float)
    shifted = a - np.max(a, axis=axis, keepdims=True)
    exps = np.exp(shifted)
    return exps / np.sum(exps, axis=axis, keepdims=True)


def sigmoid(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    positive = a >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-a[positive]))
    exp_a = np.exp(a[~positive])
    out[~positive] = exp_a / (1.0 + exp_a)
    return out


def gaussian_basis(x: ArrayLike, c: ArrayLike, r: float) -> float:
    """
    exp(-||x - c||^2 / r^2), for scalars or vectors.

    Raises:
        NonPositiveRadius: r <= 0
    """
    if not r > 0:
        raise NonPositiveRadius(f"radius must be positive, got {r!r}")
    diff = np.asarray(x, dtype=float) - np.asarray(c, dtype=float)
    return float(np.exp(-np.sum(diff * diff) / (r * r)))


def squared_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape (len(A), len(B)), clipped at 0."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    sq = np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :] - 2.0 * (A @ B.T)
    return np.maximum(sq, 0.0)


def rbf_kernel(x1: np.ndarray, x2: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||x1 - x2||^2)."""
    diff = np.asarray(x1, dtype=float) - np.asarray(x2, dtype=float)
    return float(np.exp(-gamma * np.dot(diff, diff)))


def linear_kernel(x1: np.ndarray, x2: np.ndarray) -> float:
    return float(np.dot(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)))


def polynomial_kernel(x1: np.ndarray, x2: np.ndarray, gamma: float, coef0: float = 0.0, degree: int = 3) -> float:
    """(gamma * <x1, x2> + coef0) ** degree."""
    return float((gamma * linear_kernel(x1, x2) + coef0) ** degree)


def sigmoid_kernel(x1: np.ndarray, x2: np.ndarray, gamma: float, coef0: float = 0.0) -> float:
    """tanh(gamma * <x1, x2> + coef0); not positive semi-definite in general."""
    return float(np.tanh(gamma * linear_kernel(x1, x2) + coef0))


KERNEL_NAMES = ("rbf", "linear", "poly", "sigmoid")


@dataclass(frozen=True)
class Kernel:
    """A kernel choice: "rbf", "linear", "poly" or "sigmoid"."""

    name: str = "rbf"
    gamma: float = 1.0
    coef0: float = 0.0
    degree: int = 3

    def __post_init__(self):
        if self.name not in KERNEL_NAMES:
            raise ValueError(f"unknown kernel {self.name!r}")
        if self.name != "linear" and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if self.name == "poly" and (isinstance(self.degree, bool) or not isinstance(self.degree, int) or self.degree < 1):
            raise ValueError(f"degree must be a positive integer, got {self.degree!r}")

    @classmethod
    def from_config(cls, cfg) -> "Kernel":
        """Kernel described by a TrainConfig's kernel fields."""
        return cls(name=cfg.kernel, gamma=cfg.gamma, coef0=cfg.coef0, degree=cfg.degree)

    def __call__(self, x1: np.ndarray, x2: np.ndarray) -> float:
        if self.name == "linear":
            return linear_kernel(x1, x2)
        if self.name == "poly":
            return polynomial_kernel(x1, x2, self.gamma, self.coef0, self.degree)
        if self.name == "sigmoid":
            return sigmoid_kernel(x1, x2, self.gamma, self.coef0)
        return rbf_kernel(x1, x2, self.gamma)

    def matrix(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Kernel values between every row of A and every row of B."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if self.name == "linear":
            return A @ B.T
        if self.name == "poly":
            return (self.gamma * (A @ B.T) + self.coef0) ** self.degree
        if self.name == "sigmoid":
            return np.tanh(self.gamma * (A @ B.T) + self.coef0)
        # row-wise differences keep each entry independent of batch composition
        out = np.empty((A.shape[0], B.shape[0]))
        for i, row in enumerate(A):
            diff = B - row
            out[i] = np.exp(-self.gamma * np.einsum("ij,ij->i", diff, diff))
        return out

    def diagonal(self, X: np.ndarray) -> np.ndarray:
        """k(x, x) for every row of X."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.name == "rbf":
            return np.ones(len(X))
        dots = np.einsum("ij,ij->i", X, X)
        if self.name == "poly":
            return (self.gamma * dots + self.coef0) ** self.degree
        if self.name == "sigmoid":
            return np.tanh(self.gamma * dots + self.coef0)
        return dots

    def gram(self, X: np.ndarray) -> np.ndarray:
        """Symmetric Gram matrix of X."""
        K = self.matrix(X, X)
        return 0.5 * (K + K.T)

    def to_dict(self) -> dict:
        return {"name": self.name, "gamma": float(self.gamma), "coef0": float(self.coef0), "degree": int(self.degree)}

    @classmethod
    def from_dict(cls, payload: dict) -> "Kernel":
        return cls(
            name=payload["name"],
            gamma=float(payload["gamma"]),
            coef0=float(payload.get("coef0", 0.0)),
            degree=int(payload.get("degree", 3)),
        )
