"""
Feature extraction and scaling.
"""

from fluxgate.features.scaler import Scaler, ScalingMode, apply_scaler, fit_scaler
from fluxgate.features.vector import (
    FEATURE_NAMES,
    FeatureVector,
    extract,
    read_features_csv,
    write_features_csv,
)

__all__ = [
    "FEATURE_NAMES",
    "FeatureVector",
    "Scaler",
    "ScalingMode",
    "apply_scaler",
    "extract",
    "fit_scaler",
    "read_features_csv",
    "write_features_csv",
]
