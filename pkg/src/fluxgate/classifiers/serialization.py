"""
Versioned model files.

Layout:

    magic     4 bytes   b"FLXG"
    version   1 byte    FORMAT_VERSION
    kind      1 byte    model kind tag
    length    4 bytes   payload length, big-endian
    payload   length    canonical JSON (sorted keys, compact separators)
    checksum  32 bytes  sha256 over kind tag + payload

The payload holds the model parameters and, optionally, the fitted scaler
the model was trained behind.
"""

import hashlib
import json
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

from fluxgate.classifiers.base import BaseClassifier
from fluxgate.classifiers.registry import get_classifier, kind_for_tag, tag_for_kind
from fluxgate.core.errors import CorruptModel, ModelFileError, VersionMismatch
from fluxgate.core.logging_config import get_logger
from fluxgate.features.scaler import Scaler

MAGIC = b"FLXG"
FORMAT_VERSION = 1
_HEADER = struct.Struct(">4sBBI")
_CHECKSUM_SIZE = 32

logger = get_logger("serialization")


def canonical_json(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False).encode("utf-8")


def encode_model(model: BaseClassifier, scaler: Optional[Scaler] = None) -> bytes:
    """Model (and optional scaler) as model-file bytes."""
    tag = tag_for_kind(model.kind)
    payload = {"model": model.to_payload()}
    if scaler is not None:
        payload["scaler"] = scaler.to_dict()
    body = canonical_json(payload)
    checksum = hashlib.sha256(bytes([tag]) + body).digest()
    return _HEADER.pack(MAGIC, FORMAT_VERSION, tag, len(body)) + body + checksum


def decode_model(data: bytes) -> Tuple[BaseClassifier, Optional[Scaler]]:
    """
    Inverse of ``encode_model``.

    Raises:
        VersionMismatch: Written by another format version
        CorruptModel: Bad magic, truncation, or checksum failure
    """
    if len(data) < _HEADER.size:
        raise CorruptModel(f"model file truncated ({len(data)} bytes)")
    magic, version, tag, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptModel("not a fluxgate model file (bad magic)")
    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)

    body = data[_HEADER.size : _HEADER.size + length]
    checksum = data[_HEADER.size + length :]
    if len(body) != length or len(checksum) != _CHECKSUM_SIZE:
        raise CorruptModel("model file truncated")
    if hashlib.sha256(bytes([tag]) + body).digest() != checksum:
        raise CorruptModel("model checksum mismatch")

    try:
        kind = kind_for_tag(tag)
        payload = json.loads(body.decode("utf-8"))
        model = get_classifier(kind).model_class.from_payload(payload["model"])
        scaler = Scaler.from_dict(payload["scaler"]) if "scaler" in payload else None
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"invalid model payload: {exc}") from exc
    return model, scaler


def save_model(model: BaseClassifier, path: Union[str, Path], scaler: Optional[Scaler] = None) -> Path:
    """Write a model file; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_model(model, scaler))
    logger.success(f"Saved {model!r} to {path}")
    return path


def load_bundle(path: Union[str, Path]) -> Tuple[BaseClassifier, Optional[Scaler]]:
    """Read a model file with its bundled scaler (None if it has none)."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc}") from exc
    model, scaler = decode_model(data)
    logger.info(f"Loaded {model!r} from {path}")
    return model, scaler


def load_model(path: Union[str, Path]) -> BaseClassifier:
    return load_bundle(path)[0]
