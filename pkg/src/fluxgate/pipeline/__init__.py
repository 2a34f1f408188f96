"""
Detection pipeline: batch and streaming classification, corpus synthesis.
"""

from fluxgate.pipeline.detector import (
    Detector,
    Stores,
    build_feature_matrix,
    classify_record,
    evaluate_observations,
    latency_summary,
    observation_features,
)
from fluxgate.pipeline.serve import serve, serve_socket
from fluxgate.pipeline.synth import SynthConfig, SynthCorpus, synth_dataset
from fluxgate.pipeline.verdict import Verdict, VerdictLabel

__all__ = [
    "Detector",
    "Stores",
    "SynthConfig",
    "SynthCorpus",
    "Verdict",
    "VerdictLabel",
    "build_feature_matrix",
    "classify_record",
    "evaluate_observations",
    "latency_summary",
    "observation_features",
    "serve",
    "serve_socket",
    "synth_dataset",
]
