"""Per-record classification outcome."""

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

from fluxgate.features.vector import FeatureVector


class VerdictLabel(str, Enum):
    FASTFLUX = "fastflux"
    LEGITIMATE = "legit"
    NOT_SUSPICIOUS = "not_suspicious"
    ERROR = "error"


@dataclass(frozen=True)
class Verdict:
    """
    Result of running one DNS response through the detector.

    ``decision_value`` and ``feature_vector`` are only set when the model was
    invoked; ``error`` only for records that could not be processed.
    ``known`` marks fast-flux verdicts taken from the known-domain table.
    """

    domain: str
    label: VerdictLabel
    decision_value: Optional[float] = None
    latency_ms: float = 0.0
    feature_vector: Optional[FeatureVector] = None
    error: Optional[str] = None
    known: bool = False

    @property
    def model_invoked(self) -> bool:
        return self.decision_value is not None

    def to_dict(self, include_latency: bool = True) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"domain": self.domain, "label": self.label.value}
        if self.decision_value is not None:
            payload["decision_value"] = self.decision_value
        if self.feature_vector is not None:
            payload["features"] = self.feature_vector.to_dict()
        if self.error is not None:
            payload["error"] = self.error
        if self.known:
            payload["known"] = True
        if include_latency:
            payload["latency_ms"] = self.latency_ms
        return payload

    def to_json(self, include_latency: bool = True) -> str:
        """One NDJSON line (without the newline)."""
        return json.dumps(self.to_dict(include_latency), sort_keys=True, separators=(",", ":"))
