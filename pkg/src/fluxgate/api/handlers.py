"""
Request handling for the classification endpoints.

Converts detector failures into HTTP errors: data problems become 400,
a missing detector 503, anything else 500.
"""

from typing import Any, Dict, List, Optional

from fastapi import HTTPException

from fluxgate.core.errors import DataError
from fluxgate.core.logging_config import get_logger
from fluxgate.dns.parser import RecordFormat
from fluxgate.pipeline.detector import Detector, latency_summary


class ClassifyHandler:
    """Wraps a Detector for the REST endpoints."""

    def __init__(self, detector: Optional[Detector]):
        self.logger = get_logger(self.__class__.__name__)
        self.detector = detector

    def _require_detector(self) -> Detector:
        if self.detector is None:
            raise HTTPException(
                status_code=503,
                detail="no model loaded; set FLUXGATE_MODEL_PATH, FLUXGATE_CENSYS_DB and FLUXGATE_GEO_DB",
            )
        return self.detector

    def handle_classify(self, record: str, fmt: RecordFormat = RecordFormat.JSON) -> Dict[str, Any]:
        """
        Classify one record.

        Raises:
            HTTPException: 400 for records that do not parse
        """
        detector = self._require_detector()
        try:
            verdict = detector.classify_record(record, fmt)
        except DataError as e:
            self.logger.debug(f"Rejected record: {e}")
            raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")
        except Exception as e:
            self.logger.error(f"Classification failed: {e}")
            raise HTTPException(status_code=500, detail=str(e))
        return {"status": "ok", "verdict": verdict.to_dict()}

    def handle_batch(self, records: List[str], fmt: RecordFormat = RecordFormat.JSON) -> Dict[str, Any]:
        """Classify many records; bad records yield error verdicts, not a failed request."""
        detector = self._require_detector()
        verdicts = detector.classify_batch(records, fmt)
        self.logger.info(f"Classified batch of {len(verdicts)} records")
        return {
            "status": "ok",
            "verdicts": [verdict.to_dict() for verdict in verdicts],
            "latency_ms": latency_summary(verdicts),
        }

    def handle_model_info(self) -> Dict[str, Any]:
        detector = self._require_detector()
        return {
            "status": "ok",
            "model": detector.model.summary(),
            "scaling": detector.scaler.mode.value,
            "threshold": detector.threshold,
            "scan_hosts": len(detector.stores.scan),
            "geo_ranges": len(detector.stores.geo),
        }
