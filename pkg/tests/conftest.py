"""Pytest configuration and fixtures."""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from fluxgate.core.logging_config import configure_for_testing  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    """Only warnings and errors reach stderr during tests."""
    configure_for_testing()


# Worked example: a fast-flux domain with 10 A records, 7 of them in the
# snapshot exposing ports {443, 3389, 1433, 5432, 80}, spread over 5 ASNs
# in 4 countries.
HEX001_IPS = [
    "10.1.0.1", "10.1.0.2",
    "10.2.0.1", "10.2.0.2",
    "10.3.0.1", "10.3.0.2",
    "10.4.0.1", "10.4.0.2",
    "10.5.0.1", "10.5.0.2",
]
HEX001_SNAPSHOT = [
    {"ip": "10.1.0.1", "ports": [443]},
    {"ip": "10.1.0.2", "ports": [3389]},
    {"ip": "10.2.0.1", "ports": [1433, 443]},
    {"ip": "10.2.0.2", "ports": [5432]},
    {"ip": "10.3.0.1", "ports": [80]},
    {"ip": "10.3.0.2", "ports": []},
    {"ip": "10.4.0.1", "ports": [443, 80]},
    {"ip": "192.0.2.77", "ports": [22, 8080]},
]
HEX001_RANGES = [
    ("10.1.0.0", "10.1.0.255", 64501, "DE", "FLUX-A"),
    ("10.2.0.0", "10.2.0.255", 64502, "DE", "FLUX-B"),
    ("10.3.0.0", "10.3.0.255", 64503, "NL", "FLUX-C"),
    ("10.4.0.0", "10.4.0.255", 64504, "US", "FLUX-D"),
    ("10.5.0.0", "10.5.0.255", 64505, "RU", "FLUX-E"),
]

# A CDN-hosted legitimate domain: 20 addresses in one AS, all scanned, port 443 only.
UEFA_IPS = [f"172.16.5.{i}" for i in range(1, 21)]
UEFA_RANGE = ("172.16.0.0", "172.16.255.255", 20940, "NL", "CDN")


def write_snapshot(path: Path, hosts) -> Path:
    path.write_text("".join(json.dumps(h) + "\n" for h in hosts), encoding="utf-8")
    return path


def write_ranges(path: Path, ranges) -> Path:
    path.write_text("".join("\t".join(str(c) for c in r) + "\n" for r in ranges), encoding="utf-8")
    return path


@pytest.fixture
def hex001_record():
    """JSON record of the worked fast-flux example."""
    return json.dumps({"domain": "hex001.info.", "ttl": 60, "a_records": HEX001_IPS, "label": "fastflux"})


@pytest.fixture
def uefa_record():
    return json.dumps({"domain": "uefa.com.", "ttl": 3600, "a_records": UEFA_IPS, "label": "legit"})


@pytest.fixture
def fixture_files(tmp_path):
    """Snapshot and range files covering both worked examples."""
    snapshot = HEX001_SNAPSHOT + [{"ip": ip, "ports": [443]} for ip in UEFA_IPS]
    return {
        "censys": write_snapshot(tmp_path / "censys.jsonl", snapshot),
        "geo": write_ranges(tmp_path / "geo.tsv", HEX001_RANGES + [UEFA_RANGE]),
    }


@pytest.fixture
def stores(fixture_files):
    from fluxgate.pipeline.detector import Stores

    return Stores.from_files(fixture_files["censys"], fixture_files["geo"])


def make_blobs(n=200, dim=8, separation=3.0, seed=0):
    """Two unit-variance Gaussian blobs at -separation and +separation."""
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.vstack([
        rng.normal(-separation, 1.0, size=(half, dim)),
        rng.normal(separation, 1.0, size=(n - half, dim)),
    ])
    y = np.array([-1] * half + [1] * (n - half))
    return X, y


@pytest.fixture
def blobs():
    return make_blobs()


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A 200 + 200 synthetic corpus written to disk, with its stores loaded."""
    from fluxgate.pipeline.detector import Stores
    from fluxgate.pipeline.synth import SynthConfig, synth_dataset

    out_dir = tmp_path_factory.mktemp("corpus")
    cfg = SynthConfig.default().with_overrides(n_fastflux=200, n_legit=200, seed=11)
    corpus = synth_dataset(cfg, out_dir)
    return {
        "dir": out_dir,
        "corpus": corpus,
        "observations": out_dir / "observations.jsonl",
        "censys": out_dir / "censys.jsonl",
        "geo": out_dir / "geo.tsv",
        "stores": Stores.from_files(out_dir / "censys.jsonl", out_dir / "geo.tsv"),
    }


@pytest.fixture(scope="session")
def trained_detector(small_corpus):
    """Detector with an SVM trained on the small corpus."""
    from fluxgate.classifiers.svm import svm_train
    from fluxgate.features.scaler import fit_scaler
    from fluxgate.pipeline.detector import Detector, build_feature_matrix

    vectors, labels = build_feature_matrix(small_corpus["stores"], small_corpus["corpus"].observations)
    scaler = fit_scaler(vectors)
    y = np.array([label.numeric for label in labels])
    model = svm_train(scaler.transform(vectors), y)
    return Detector(small_corpus["stores"], scaler, model, threshold=5)


@pytest.fixture(scope="session")
def model_file(tmp_path_factory, trained_detector):
    """The trained detector's model and scaler saved as a model file."""
    from fluxgate.classifiers.serialization import save_model

    path = tmp_path_factory.mktemp("models") / "svm.flxg"
    return save_model(trained_detector.model, path, scaler=trained_detector.scaler)
