"""
The eight per-response features and their CSV export.

    f1  domain length (canonical name, no trailing dot)
    f2  number of distinct countries
    f3  number of distinct open ports on scanned hosts
    f4  number of A records
    f5  IP ratio: scanned hosts found / addresses queried
    f6  TTL in seconds
    f7  distinct ASNs / f4
    f8  distinct countries / f4
"""

import csv
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from fluxgate.core.errors import DataError, InconsistentInputs
from fluxgate.dns.observation import DnsObservation, Label
from fluxgate.stores.censys_store import ScanLookupResult
from fluxgate.stores.geo_store import GeoSummary

FEATURE_NAMES = ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8")
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureVector:
    f1_domain_length: float
    f2_regions: float
    f3_ports: float
    f4_ip_count: float
    f5_ip_ratio: float
    f6_ttl: float
    f7_asn_ratio: float
    f8_regional_spread: float

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if not math.isfinite(value) or value < 0:
                raise DataError(f"{item.name} must be finite and non-negative, got {value!r}")
        if self.f4_ip_count < 1:
            raise DataError("f4_ip_count must be at least 1")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def to_dict(self) -> dict:
        return dict(zip(FEATURE_NAMES, astuple(self)))

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "FeatureVector":
        if len(values) != N_FEATURES:
            raise DataError(f"expected {N_FEATURES} feature values, got {len(values)}")
        return cls(*(float(v) for v in values))


def extract(obs: DnsObservation, scan: ScanLookupResult, geo: GeoSummary) -> FeatureVector:
    """
    Build the feature vector of one response from its two store lookups.

    Raises:
        InconsistentInputs: The lookups were made for a different address set
    """
    ip_count = obs.ip_count
    if scan.queried != ip_count or geo.queried != ip_count:
        raise InconsistentInputs(
            f"{obs.domain}: {ip_count} A records but scan queried {scan.queried}, "
            f"geo queried {geo.queried}"
        )
    return FeatureVector(
        f1_domain_length=float(len(obs.canonical_domain)),
        f2_regions=float(geo.distinct_countries),
        f3_ports=float(scan.distinct_ports),
        f4_ip_count=float(ip_count),
        f5_ip_ratio=scan.found / scan.queried,
        f6_ttl=float(obs.ttl),
        f7_asn_ratio=geo.distinct_asns / ip_count,
        f8_regional_spread=geo.distinct_countries / ip_count,
    )


def _format_value(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def write_features_csv(
    path: Union[str, Path],
    vectors: Sequence[FeatureVector],
    labels: Sequence[Optional[Label]],
) -> int:
    """Write a header row f1..f8,label and one row per vector; returns rows written.

    Labels are written as -1 (fast-flux) and +1 (legitimate); unlabeled rows
    get an empty label cell.
    """
    if len(vectors) != len(labels):
        raise DataError(f"{len(vectors)} vectors but {len(labels)} labels")
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([*FEATURE_NAMES, "label"])
        for vector, label in zip(vectors, labels):
            if label is None or label is Label.UNKNOWN:
                cell = ""
            else:
                cell = f"{label.numeric:+d}"
            writer.writerow([*(_format_value(v) for v in astuple(vector)), cell])
    return len(vectors)


def read_features_csv(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Read a feature CSV back into (X, y).

    Returns:
        X of shape (n, 8) and y of shape (n,) with values -1/+1

    Raises:
        DataError: Wrong header, bad values, or an unlabeled row
    """
    rows: List[List[float]] = []
    labels: List[int] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != [*FEATURE_NAMES, "label"]:
            raise DataError(f"{path}: expected header {','.join(FEATURE_NAMES)},label")
        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != N_FEATURES + 1:
                raise DataError(f"{path}:{line_number}: expected {N_FEATURES + 1} columns")
            try:
                values = [float(cell) for cell in row[:N_FEATURES]]
                label = int(row[N_FEATURES])
            except ValueError as exc:
                raise DataError(f"{path}:{line_number}: {exc}") from exc
            if label not in (-1, 1):
                raise DataError(f"{path}:{line_number}: label must be -1 or +1, got {label}")
            rows.append(values)
            labels.append(label)
    return np.array(rows, dtype=float).reshape(-1, N_FEATURES), np.array(labels, dtype=int)
