"""Versioned single-file persistence for a trained model plus its scaler.

Layout: the magic string "PDFMLP", a little-endian uint32 format version,
then length-prefixed sections (4-byte ASCII tag, uint64-LE payload
length, payload).  Section "META" is canonical JSON describing the
architecture, threshold, schema id and an ordered array manifest;
section "ARRS" is the manifest's arrays concatenated as raw
little-endian float64, which makes save/load round trips bit-exact.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from typing import Any, Optional

import numpy as np

from .mlp import BatchNormState, DenseLayer, MlpModel
from .preprocess import Dataset, Scaler

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "ModelStoreError",
    "ModelFormatError",
    "TruncatedModelError",
    "UnsupportedVersionError",
    "dumps",
    "loads",
    "save",
    "load",
    "model_checksum",
    "dataset_checksum",
]

MAGIC = b"PDFMLP"
FORMAT_VERSION = 1


class ModelStoreError(Exception):
    """Base class for model-file problems."""


class ModelFormatError(ModelStoreError):
    """Structurally invalid content (bad magic, width mismatch, bad JSON)."""


class TruncatedModelError(ModelStoreError):
    """The file ends before a declared section does."""


class UnsupportedVersionError(ModelStoreError):
    """The file declares a format version this build cannot read."""


def _layer_arrays(layer: DenseLayer) -> list[tuple[str, np.ndarray]]:
    arrays = [("weights", layer.weights), ("biases", layer.biases)]
    if layer.batch_norm is not None:
        bn = layer.batch_norm
        arrays += [
            ("gamma", bn.gamma),
            ("beta", bn.beta),
            ("running_mean", bn.running_mean),
            ("running_var", bn.running_var),
        ]
    return arrays


def dumps(
    model: MlpModel,
    scaler: Scaler,
    fingerprint: Optional[dict[str, Any]] = None,
) -> bytes:
    """Serialize to bytes; identical inputs always produce identical bytes."""
    manifest: list[dict[str, Any]] = []
    blobs: list[bytes] = []

    def put(name: str, arr: np.ndarray) -> None:
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        manifest.append({"name": name, "shape": list(arr.shape)})
        blobs.append(arr.astype("<f8").tobytes())

    put("scaler.means", scaler.means)
    put("scaler.stds", scaler.stds)
    layer_specs = []
    for i, layer in enumerate(model.layers):
        bn = layer.batch_norm
        layer_specs.append(
            {
                "in": layer.in_width,
                "out": layer.out_width,
                "activation": layer.activation,
                "dropout_rate": layer.dropout_rate,
                "batch_norm": (
                    {"momentum": bn.momentum, "epsilon": bn.epsilon} if bn else None
                ),
            }
        )
        for name, arr in _layer_arrays(layer):
            put(f"layer{i}.{name}", arr)

    meta = {
        "format": "pdfmlp-model",
        "schema_id": scaler.schema_id,
        "threshold": model.threshold,
        "layers": layer_specs,
        "fingerprint": fingerprint,
        "arrays": manifest,
    }
    meta_bytes = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")
    arrs_bytes = b"".join(blobs)

    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", FORMAT_VERSION)
    for tag, payload in ((b"META", meta_bytes), (b"ARRS", arrs_bytes)):
        out += tag
        out += struct.pack("<Q", len(payload))
        out += payload
    return bytes(out)


def loads(blob: bytes) -> tuple[MlpModel, Scaler, str]:
    """Parse bytes produced by dumps; returns (model, scaler, schema_id)."""
    if len(blob) < len(MAGIC) + 4:
        raise TruncatedModelError("file shorter than the fixed header")
    if blob[: len(MAGIC)] != MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    (version,) = struct.unpack_from("<I", blob, len(MAGIC))
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported format version {version} (this build reads {FORMAT_VERSION})"
        )

    sections: dict[bytes, bytes] = {}
    pos = len(MAGIC) + 4
    while pos < len(blob):
        if pos + 12 > len(blob):
            raise TruncatedModelError("truncated section header")
        tag = blob[pos : pos + 4]
        (length,) = struct.unpack_from("<Q", blob, pos + 4)
        pos += 12
        if pos + length > len(blob):
            raise TruncatedModelError(f"truncated {tag!r} section")
        sections[tag] = blob[pos : pos + length]
        pos += length

    for required in (b"META", b"ARRS"):
        if required not in sections:
            raise ModelFormatError(f"missing {required!r} section")

    try:
        meta = json.loads(sections[b"META"].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"unreadable metadata: {exc}") from exc
    if not isinstance(meta, dict) or meta.get("format") != "pdfmlp-model":
        raise ModelFormatError("metadata does not describe a model")

    arrays = _read_arrays(meta.get("arrays"), sections[b"ARRS"])
    try:
        scaler = Scaler(
            means=arrays.pop("scaler.means"),
            stds=arrays.pop("scaler.stds"),
            schema_id=str(meta["schema_id"]),
        )
        layers = []
        for i, spec in enumerate(meta["layers"]):
            bn_spec = spec.get("batch_norm")
            bn = None
            if bn_spec is not None:
                bn = BatchNormState(
                    gamma=arrays.pop(f"layer{i}.gamma"),
                    beta=arrays.pop(f"layer{i}.beta"),
                    running_mean=arrays.pop(f"layer{i}.running_mean"),
                    running_var=arrays.pop(f"layer{i}.running_var"),
                    momentum=float(bn_spec["momentum"]),
                    epsilon=float(bn_spec["epsilon"]),
                )
            layer = DenseLayer(
                weights=arrays.pop(f"layer{i}.weights"),
                biases=arrays.pop(f"layer{i}.biases"),
                activation=spec["activation"],
                batch_norm=bn,
                dropout_rate=float(spec["dropout_rate"]),
            )
            if layer.in_width != int(spec["in"]) or layer.out_width != int(spec["out"]):
                raise ModelFormatError(
                    f"layer {i}: declared widths {spec['in']}x{spec['out']} do not "
                    f"match stored arrays {layer.in_width}x{layer.out_width}"
                )
            layers.append(layer)
        model = MlpModel(layers=layers, threshold=float(meta["threshold"]))
    except ModelStoreError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"inconsistent model description: {exc}") from exc
    return model, scaler, str(meta["schema_id"])


def _read_arrays(manifest: Any, payload: bytes) -> dict[str, np.ndarray]:
    if not isinstance(manifest, list):
        raise ModelFormatError("array manifest missing")
    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for entry in manifest:
        try:
            name = entry["name"]
            shape = tuple(int(s) for s in entry["shape"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"bad manifest entry: {entry!r}") from exc
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = count * 8
        if offset + nbytes > len(payload):
            raise TruncatedModelError(f"array {name!r} extends past the data section")
        flat = np.frombuffer(payload, dtype="<f8", count=count, offset=offset)
        arrays[name] = flat.astype(np.float64).reshape(shape)
        offset += nbytes
    if offset != len(payload):
        raise ModelFormatError("data section has trailing bytes")
    return arrays


def save(
    model: MlpModel,
    scaler: Scaler,
    path: str,
    fingerprint: Optional[dict[str, Any]] = None,
) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    blob = dumps(model, scaler, fingerprint)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix=".pdfmlp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def load(path: str) -> tuple[MlpModel, Scaler, str]:
    with open(path, "rb") as fh:
        return loads(fh.read())


def model_checksum(
    model: MlpModel,
    scaler: Scaler,
    fingerprint: Optional[dict[str, Any]] = None,
) -> str:
    return hashlib.sha256(dumps(model, scaler, fingerprint)).hexdigest()


def dataset_checksum(dataset: Dataset) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(dataset.features, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(dataset.labels, dtype="<i8").tobytes())
    for p in dataset.paths:
        h.update(p.encode("utf-8", "replace"))
        h.update(b"\x00")
    return h.hexdigest()
