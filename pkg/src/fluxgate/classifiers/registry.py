"""
Classifier registry - maps model kinds to their trainer and model class.

The evaluation harness, grid search, CLI and model loader dispatch through
it, so a new kind only needs registering here.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Type

import numpy as np

from fluxgate.classifiers.base import BaseClassifier
from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.mlp import MlpModel, mlp_train
from fluxgate.classifiers.rbfnet import RbfNetModel, rbfnet_train
from fluxgate.classifiers.svm import SvmModel, svm_train

Trainer = Callable[[np.ndarray, np.ndarray, TrainConfig], BaseClassifier]


@dataclass(frozen=True)
class ClassifierSpec:
    """A registered classifier kind."""

    kind: str
    tag: int
    trainer: Trainer
    model_class: Type[BaseClassifier]
    display_name: str


class ClassifierRegistry:
    """
    Central registry of classifier kinds.

    Supports:
    - Registration of a kind with its file tag, trainer and model class
    - Lookup by kind or by model-file tag
    - Training by kind
    """

    def __init__(self):
        self._registry: Dict[str, ClassifierSpec] = {}

    def register(self, spec: ClassifierSpec) -> None:
        """
        Register a classifier kind.

        Raises:
            ValueError: The model class is not a BaseClassifier, or the kind or tag is taken
        """
        if not issubclass(spec.model_class, BaseClassifier):
            raise ValueError(f"{spec.model_class} must inherit from BaseClassifier")
        if spec.kind in self._registry:
            raise ValueError(f"classifier '{spec.kind}' is already registered")
        if any(existing.tag == spec.tag for existing in self._registry.values()):
            raise ValueError(f"model file tag {spec.tag} is already in use")
        self._registry[spec.kind] = spec

    def unregister(self, kind: str) -> None:
        self._registry.pop(kind, None)

    def get(self, kind: str) -> ClassifierSpec:
        """
        Raises:
            KeyError: Unknown kind
        """
        spec = self._registry.get(kind)
        if spec is None:
            raise KeyError(f"classifier '{kind}' not found in registry")
        return spec

    def by_tag(self, tag: int) -> ClassifierSpec:
        for spec in self._registry.values():
            if spec.tag == tag:
                return spec
        raise KeyError(f"no classifier registered for model file tag {tag}")

    def train(self, kind: str, X: np.ndarray, y: np.ndarray, cfg: Optional[TrainConfig] = None) -> BaseClassifier:
        return self.get(kind).trainer(X, y, cfg or TrainConfig())

    def list_kinds(self) -> List[str]:
        return list(self._registry.keys())

    def __contains__(self, kind: str) -> bool:
        return kind in self._registry

    def __repr__(self) -> str:
        return f"<ClassifierRegistry: {', '.join(self._registry)}>"


_global_registry = ClassifierRegistry()
_global_registry.register(ClassifierSpec("svm", 1, svm_train, SvmModel, "SVM"))
_global_registry.register(ClassifierSpec("mlp", 2, mlp_train, MlpModel, "MLP"))
_global_registry.register(ClassifierSpec("rbfnet", 3, rbfnet_train, RbfNetModel, "RBF network"))


def get_registry() -> ClassifierRegistry:
    return _global_registry


def get_classifier(kind: str) -> ClassifierSpec:
    return _global_registry.get(kind)


def list_classifiers() -> List[str]:
    return _global_registry.list_kinds()


def train_classifier(kind: str, X: np.ndarray, y: np.ndarray, cfg: Optional[TrainConfig] = None) -> BaseClassifier:
    """Train a model of the given kind on scaled inputs."""
    return _global_registry.train(kind, X, y, cfg)


def tag_for_kind(kind: str) -> int:
    return _global_registry.get(kind).tag


def kind_for_tag(tag: int) -> str:
    try:
        return _global_registry.by_tag(tag).kind
    except KeyError as exc:
        raise ValueError(str(exc)) from exc
