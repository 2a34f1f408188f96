"""
Online detector: one DNS response in, one verdict out.

parse -> suspicious gate -> scan lookup -> geo summary -> extract -> scale -> decide
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from fluxgate.classifiers.base import BaseClassifier
from fluxgate.classifiers.config import TrainConfig
from fluxgate.classifiers.serialization import load_bundle
from fluxgate.core.errors import DataError, ModelFileError
from fluxgate.core.logging_config import get_logger
from fluxgate.core.settings import gate_threshold, worker_threads
from fluxgate.dns.gate import is_suspicious
from fluxgate.dns.observation import DnsObservation, Label
from fluxgate.dns.parser import RawRecord, RecordFormat, decode_line, iter_lines, parse_observation
from fluxgate.evaluation.grid_search import Grid, GridSearchResult, grid_search
from fluxgate.evaluation.harness import EvaluationOptions, evaluate
from fluxgate.evaluation.metrics import latency_stats
from fluxgate.evaluation.report import EvaluationReport
from fluxgate.features.scaler import Scaler
from fluxgate.features.vector import FeatureVector, extract
from fluxgate.pipeline.known_domains import KnownDomains
from fluxgate.pipeline.verdict import Verdict, VerdictLabel
from fluxgate.stores.censys_store import ScanStore
from fluxgate.stores.geo_store import GeoStore


@dataclass(frozen=True)
class Stores:
    """The two local databases, loaded once and shared read-only."""

    scan: ScanStore
    geo: GeoStore

    @classmethod
    def from_files(cls, censys_path: Union[str, Path], geo_path: Union[str, Path]) -> "Stores":
        return cls(scan=ScanStore.from_file(censys_path), geo=GeoStore.from_file(geo_path))


def observation_features(stores: Stores, obs: DnsObservation) -> FeatureVector:
    """Look the response's addresses up in both stores and build its features."""
    scan = stores.scan.lookup(obs.a_records)
    geo = stores.geo.summarize(obs.a_records)
    return extract(obs, scan, geo)


def build_feature_matrix(
    stores: Stores, observations: Sequence[DnsObservation]
) -> Tuple[List[FeatureVector], List[Optional[Label]]]:
    """Features and labels for every observation, in input order."""
    vectors = [observation_features(stores, obs) for obs in observations]
    return vectors, [obs.label for obs in observations]


def evaluate_observations(
    stores: Stores,
    observations: Sequence[DnsObservation],
    model_kind: str,
    cfg: Optional[TrainConfig] = None,
    options: Optional[EvaluationOptions] = None,
    grid: Optional[Grid] = None,
) -> Union[EvaluationReport, GridSearchResult]:
    """
    Cross-validate on labeled observations with extraction inside the timed path.

    Every held-out record is re-extracted against the (already loaded) stores
    before it is scaled and classified, so the reported per-record latency
    matches what the detector pays online. With ``grid`` a grid search is run
    instead of a single evaluation.

    Raises:
        DataError: An observation carries no fast-flux/legitimate label
    """
    labels = []
    for obs in observations:
        if obs.label is None or obs.label is Label.UNKNOWN:
            raise DataError(f"observation for {obs.domain} has no label")
        labels.append(obs.label.numeric)
    X = np.array([observation_features(stores, obs).as_array() for obs in observations], dtype=float)
    y = np.array(labels, dtype=int)

    def extract_row(index: int) -> np.ndarray:
        return observation_features(stores, observations[index]).as_array()

    if grid is not None:
        return grid_search(X, y, model_kind, grid, base=cfg, options=options, extract_row=extract_row)
    return evaluate(X, y, model_kind, cfg, options, extract_row=extract_row)


def _domain_hint(record: RawRecord) -> str:
    """Best-effort domain of a record that failed to parse."""
    try:
        payload = json.loads(record)
    except (TypeError, ValueError):
        return ""
    domain = payload.get("domain") if isinstance(payload, dict) else None
    return domain if isinstance(domain, str) else ""


class Detector:
    """
    Stores, scaler and model bundled for classification.

    All three are read-only after construction, so one detector can serve
    any number of threads. An optional KnownDomains table is consulted
    before the suspicious gate; with ``remember_detections`` every
    fast-flux verdict is added to it.
    """

    def __init__(
        self,
        stores: Stores,
        scaler: Scaler,
        model: BaseClassifier,
        threshold: Optional[int] = None,
        known: Optional[KnownDomains] = None,
        remember_detections: bool = False,
    ):
        if not scaler.fitted:
            raise ModelFileError("detector needs a fitted scaler")
        self.logger = get_logger(self.__class__.__name__)
        self.stores = stores
        self.scaler = scaler
        self.model = model
        self.threshold = threshold if threshold is not None else gate_threshold()
        self.known = known if known is not None else (KnownDomains() if remember_detections else None)
        self.remember_detections = remember_detections

    @classmethod
    def from_files(
        cls,
        model_path: Union[str, Path],
        censys_path: Union[str, Path],
        geo_path: Union[str, Path],
        threshold: Optional[int] = None,
        known_path: Optional[Union[str, Path]] = None,
        remember_detections: bool = False,
    ) -> "Detector":
        """Load a model file (with its bundled scaler), both stores and an optional known-domain file."""
        model, scaler = load_bundle(model_path)
        if scaler is None:
            raise ModelFileError(f"{model_path} carries no scaler; retrain with `fluxgate train`")
        known = KnownDomains.from_file(known_path) if known_path else None
        return cls(Stores.from_files(censys_path, geo_path), scaler, model, threshold, known, remember_detections)

    def classify_observation(self, obs: DnsObservation, started: Optional[float] = None) -> Verdict:
        started = time.perf_counter() if started is None else started
        if self.known is not None and obs.domain in self.known:
            return Verdict(
                domain=obs.domain,
                label=VerdictLabel.FASTFLUX,
                latency_ms=(time.perf_counter() - started) * 1000.0,
                known=True,
            )
        if not is_suspicious(obs, self.threshold):
            return Verdict(
                domain=obs.domain,
                label=VerdictLabel.NOT_SUSPICIOUS,
                latency_ms=(time.perf_counter() - started) * 1000.0,
            )

        features = observation_features(self.stores, obs)
        decision = self.model.decide(self.scaler.transform_one(features))
        label = VerdictLabel.LEGITIMATE if decision > 0 else VerdictLabel.FASTFLUX
        if label is VerdictLabel.FASTFLUX and self.remember_detections and self.known.add(obs.domain):
            self.logger.debug(f"Remembering {obs.domain} as fast-flux")
        return Verdict(
            domain=obs.domain,
            label=label,
            decision_value=decision,
            latency_ms=(time.perf_counter() - started) * 1000.0,
            feature_vector=features,
        )

    def classify_record(self, record: RawRecord, fmt: RecordFormat = RecordFormat.JSON) -> Verdict:
        """
        Classify one raw record.

        Raises:
            MalformedRecord: The record does not parse
            NoARecords: The response has no A records
        """
        started = time.perf_counter()
        obs = parse_observation(record, fmt)
        return self.classify_observation(obs, started)

    def _error_verdict(self, record: RawRecord, fmt: RecordFormat, exc: DataError, started: float) -> Verdict:
        domain = _domain_hint(record) if RecordFormat(fmt) is RecordFormat.JSON else ""
        return Verdict(
            domain=domain,
            label=VerdictLabel.ERROR,
            latency_ms=(time.perf_counter() - started) * 1000.0,
            error=f"{type(exc).__name__}: {exc}",
        )

    def classify_record_safe(self, record: RawRecord, fmt: RecordFormat = RecordFormat.JSON) -> Verdict:
        """Like ``classify_record`` but data errors become error verdicts."""
        started = time.perf_counter()
        try:
            return self.classify_record(record, fmt)
        except DataError as exc:
            return self._error_verdict(record, fmt, exc, started)

    def classify_line(self, line: RawRecord, fmt: RecordFormat = RecordFormat.JSON, strict: bool = False) -> Verdict:
        """
        Classify one line of a record stream.

        Bytes are decoded as UTF-8 first (wire records are hex text on a
        line); a line that does not decode is a malformed record.
        """
        started = time.perf_counter()
        try:
            return self.classify_record(decode_line(line), fmt)
        except DataError as exc:
            if strict:
                raise
            return self._error_verdict(line, fmt, exc, started)

    def _map(self, classify: Callable[[RawRecord], Verdict], items: Iterable[RawRecord], workers: Optional[int]):
        with ThreadPoolExecutor(max_workers=workers or worker_threads()) as pool:
            verdicts = list(pool.map(classify, items))
        errors = sum(1 for v in verdicts if v.label is VerdictLabel.ERROR)
        if errors:
            self.logger.warning(f"{errors} of {len(verdicts)} records could not be classified")
        return verdicts

    def classify_batch(
        self,
        records: Iterable[RawRecord],
        fmt: RecordFormat = RecordFormat.JSON,
        strict: bool = False,
        workers: Optional[int] = None,
    ) -> List[Verdict]:
        """
        Classify records on a worker pool; verdicts keep input order.

        In strict mode the first bad record raises instead of yielding an
        error verdict.
        """
        classify = self.classify_record if strict else self.classify_record_safe
        return self._map(lambda record: classify(record, fmt), records, workers)

    def classify_lines(
        self,
        lines: Iterable[RawRecord],
        fmt: RecordFormat = RecordFormat.JSON,
        strict: bool = False,
        workers: Optional[int] = None,
    ) -> List[Verdict]:
        """
        Classify the lines of a record stream, in order.

        Blank lines are skipped exactly as ``serve`` skips them, so both
        produce the same verdicts for the same input.
        """
        return self._map(lambda line: self.classify_line(line, fmt, strict), iter_lines(lines), workers)

    def __repr__(self) -> str:
        return f"<Detector: {self.model!r}, threshold={self.threshold}>"


def classify_record(
    stores: Stores,
    scaler: Scaler,
    model: BaseClassifier,
    record: RawRecord,
    threshold: Optional[int] = None,
    fmt: RecordFormat = RecordFormat.JSON,
) -> Verdict:
    """One-shot classification without building a Detector first."""
    return Detector(stores, scaler, model, threshold).classify_record(record, fmt)


def latency_summary(verdicts: Iterable[Verdict]) -> dict:
    """Latency statistics over verdicts where the model was invoked."""
    return latency_stats([v.latency_ms for v in verdicts if v.model_invoked])
