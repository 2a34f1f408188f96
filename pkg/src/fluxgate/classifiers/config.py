"""Training hyperparameters shared by all classifier kinds."""

from dataclasses import asdict, dataclass, field, replace
from typing import Tuple

from fluxgate.classifiers.kernels import KERNEL_NAMES
from fluxgate.features.vector import N_FEATURES

KERNELS = KERNEL_NAMES
RBF_ACTIVATIONS = ("gaussian", "softmax")


@dataclass(frozen=True)
class TrainConfig:
    """
    Hyperparameters for svm, mlp and rbfnet training.

    Only the fields relevant to a model kind are read by its trainer.
    """

    # svm
    C: float = 10.0
    gamma: float = 1.0 / N_FEATURES
    tolerance: float = 1e-3
    max_passes: int = 50
    kernel: str = "rbf"
    coef0: float = 0.0
    degree: int = 3
    # shared
    seed: int = 0
    # mlp
    learning_rate: float = 0.1
    epochs: int = 200
    batch_size: int = 32
    hidden_sizes: Tuple[int, ...] = field(default=(16,))
    min_learning_rate: float = 1e-6
    # rbfnet
    n_centers: int = 20
    rbf_activation: str = "gaussian"
    ridge: float = 1e-6
    max_restarts: int = 3

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        for name in ("C", "gamma", "tolerance", "learning_rate", "min_learning_rate", "ridge"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("max_passes", "degree", "epochs", "batch_size", "n_centers", "max_restarts"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ValueError(f"hidden_sizes must be non-empty and positive, got {self.hidden_sizes}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.rbf_activation not in RBF_ACTIVATIONS:
            raise ValueError(f"rbf_activation must be one of {RBF_ACTIVATIONS}, got {self.rbf_activation!r}")

    def with_overrides(self, **overrides) -> "TrainConfig":
        """Copy with the given non-None fields replaced."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["hidden_sizes"] = list(self.hidden_sizes)
        return payload
