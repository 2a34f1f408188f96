import json
from typing import Any, Dict, List, Mapping, Union

import requests

Record = Union[str, Mapping[str, Any]]


class FluxgateClient:
    """
    Client for the fluxgate HTTP service.

    Records may be passed as JSON-lines text, as dicts (serialized here), or
    as hex-encoded wire messages with ``fmt="wire"``.
    """

    def __init__(self, base_url: str = "http://localhost:8008/api", timeout: float = 15):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        # Ensure the fluxgate API is running before using.

    @staticmethod
    def _as_text(record: Record) -> str:
        if isinstance(record, str):
            return record
        return json.dumps(dict(record), separators=(",", ":"))

    def classify(self, record: Record, fmt: str = "json") -> Dict[str, Any]:
        """Classify one DNS response; returns the verdict dict."""
        url = f"{self.base_url}/classify"
        payload = {"record": self._as_text(record), "format": fmt}
        resp = requests.post(url, json=payload, timeout=self.timeout)
        resp.raise_for_status()
        return resp.json()["verdict"]

    def classify_batch(self, records: List[Record], fmt: str = "json") -> List[Dict[str, Any]]:
        """Classify many DNS responses; verdicts come back in request order."""
        url = f"{self.base_url}/classify/batch"
        payload = {"records": [self._as_text(r) for r in records], "format": fmt}
        resp = requests.post(url, json=payload, timeout=self.timeout)
        resp.raise_for_status()
        return resp.json()["verdicts"]

    def model_info(self) -> Dict[str, Any]:
        """Describe the model and stores the service has loaded."""
        resp = requests.get(f"{self.base_url}/model", timeout=self.timeout)
        resp.raise_for_status()
        return resp.json()
