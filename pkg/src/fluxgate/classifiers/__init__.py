"""
Classifier families: SVM (SMO), MLP and RBF network, with model files.
"""

from fluxgate.classifiers.base import FASTFLUX, LEGITIMATE, BaseClassifier
from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.kernels import Kernel, gaussian_basis, rbf_kernel, softmax
from fluxgate.classifiers.mlp import MlpModel, mlp_forward, mlp_train
from fluxgate.classifiers.rbfnet import RbfNetModel, rbfnet_forward, rbfnet_train
from fluxgate.classifiers.registry import get_registry, list_classifiers, train_classifier
from fluxgate.classifiers.serialization import load_bundle, load_model, save_model
from fluxgate.classifiers.svm import SvmModel, dual_objective, svm_decision, svm_train

__all__ = [
    "FASTFLUX",
    "LEGITIMATE",
    "BaseClassifier",
    "Kernel",
    "MlpModel",
    "RbfNetModel",
    "SvmModel",
    "TrainConfig",
    "dual_objective",
    "gaussian_basis",
    "get_registry",
    "list_classifiers",
    "load_bundle",
    "load_model",
    "mlp_forward",
    "mlp_train",
    "rbf_kernel",
    "rbfnet_forward",
    "rbfnet_train",
    "save_model",
    "softmax",
    "svm_decision",
    "svm_train",
    "train_classifier",
]
