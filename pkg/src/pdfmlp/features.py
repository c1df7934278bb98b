"""The 48-feature static schema and its extractor.

Features fall into four categories: document structure, object
properties (auto-action and scripting keywords), content statistics
(entropy, stream/filter shape) and metadata.  Every feature is a real
number; flags are 0/1.  Extraction is deterministic and total: a
degenerate document produces zeros, never an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, NamedTuple, Optional

import numpy as np

from .pdf import (
    DiagnosticKind,
    PdfDocument,
    PdfName,
    PdfRef,
    PdfStream,
    PdfString,
    canonical_filter_name,
    iter_name_occurrences,
)

__all__ = [
    "SCHEMA_ID",
    "N_FEATURES",
    "FeatureDescriptor",
    "FeatureSchema",
    "FeatureVector",
    "describe_schema",
    "extract_features",
    "shannon_entropy",
]

SCHEMA_ID = "pdfmlp-v1"
N_FEATURES = 48

CATEGORIES = ("structure", "object-properties", "content-stats", "metadata")

# Tokens whose presence inside JavaScript payloads indicates obfuscation.
_OBFUSCATION_TOKENS = (b"eval", b"unescape", b"String.fromCharCode", b"charCodeAt")

# Names counted by the object-properties block, in schema order.  The
# /GoToR-or-GoToE entry sums two names.
_COUNTED_NAMES = (
    "/JavaScript",
    "/JS",
    "/OpenAction",
    "/AA",
    "/Launch",
    "/EmbeddedFile",
    "/RichMedia",
    "/AcroForm",
    "/XFA",
    "/URI",
    ("/GoToR", "/GoToE"),
    "/ObjStm",
    "/Encrypt",
    "/Names",
    "/SubmitForm",
    "/Action",
)


class FeatureDescriptor(NamedTuple):
    name: str
    category: str
    description: str
    unit: str


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered definition of what each of the 48 features means."""

    schema_id: str
    descriptors: tuple[FeatureDescriptor, ...]

    def __post_init__(self) -> None:
        if len(self.descriptors) != N_FEATURES:
            raise ValueError(f"schema must have {N_FEATURES} descriptors")
        names = [d.name for d in self.descriptors]
        if len(set(names)) != N_FEATURES:
            raise ValueError("descriptor names must be unique")

    def index_of(self, name: str) -> int:
        for i, d in enumerate(self.descriptors):
            if d.name == name:
                return i
        raise KeyError(name)

    def category_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in CATEGORIES}
        for d in self.descriptors:
            counts[d.category] += 1
        return counts


@dataclass
class FeatureVector:
    """Exactly 48 finite real values in schema order."""

    values: np.ndarray
    schema_id: str = SCHEMA_ID
    source_path: Optional[str] = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")

    def __getitem__(self, name: str) -> float:
        return float(self.values[describe_schema().index_of(name)])


def _d(name: str, category: str, description: str, unit: str = "count") -> FeatureDescriptor:
    return FeatureDescriptor(name, category, description, unit)


_DESCRIPTORS: tuple[FeatureDescriptor, ...] = (
    # structure (12)
    _d("file_size", "structure", "total input length", "bytes"),
    _d("header_version", "structure", "numeric PDF version from the %PDF- header, 0 if absent", "version"),
    _d("object_count", "structure", "indirect objects found, including ones unpacked from object streams"),
    _d("stream_count", "structure", "stream objects found"),
    _d("xref_section_count", "structure", "cross-reference tables and cross-reference stream objects"),
    _d("trailer_count", "structure", "trailer dictionaries (classic and cross-reference stream)"),
    _d("startxref_count", "structure", "startxref markers"),
    _d("eof_count", "structure", "%%EOF markers"),
    _d("bytes_after_last_eof", "structure", "bytes following the final %%EOF marker (whole file if none)", "bytes"),
    _d("max_nesting_depth", "structure", "deepest container nesting over all object values", "levels"),
    _d("duplicate_object_count", "structure", "object numbers defined more than once"),
    _d("diagnostic_count", "structure", "parser diagnostics of any kind"),
    # object-properties (16)
    _d("count_javascript", "object-properties", "/JavaScript name occurrences (escape-canonicalized)"),
    _d("count_js", "object-properties", "/JS name occurrences"),
    _d("count_openaction", "object-properties", "/OpenAction name occurrences"),
    _d("count_aa", "object-properties", "/AA additional-actions name occurrences"),
    _d("count_launch", "object-properties", "/Launch action name occurrences"),
    _d("count_embeddedfile", "object-properties", "/EmbeddedFile name occurrences"),
    _d("count_richmedia", "object-properties", "/RichMedia name occurrences"),
    _d("count_acroform", "object-properties", "/AcroForm name occurrences"),
    _d("count_xfa", "object-properties", "/XFA form name occurrences"),
    _d("count_uri", "object-properties", "/URI name occurrences"),
    _d("count_goto_remote", "object-properties", "/GoToR plus /GoToE remote-goto name occurrences"),
    _d("count_objstm", "object-properties", "/ObjStm name occurrences"),
    _d("count_encrypt", "object-properties", "/Encrypt name occurrences"),
    _d("count_names", "object-properties", "/Names name occurrences"),
    _d("count_submitform", "object-properties", "/SubmitForm name occurrences"),
    _d("count_action", "object-properties", "/Action name occurrences"),
    # content-stats (14)
    _d("entropy_file", "content-stats", "byte entropy of the whole file", "bits"),
    _d("entropy_streams", "content-stats", "byte entropy over all stream content (decoded when possible)", "bits"),
    _d("entropy_outside_streams", "content-stats", "byte entropy of the file outside raw stream extents", "bits"),
    _d("entropy_stream_max", "content-stats", "largest per-stream content entropy", "bits"),
    _d("stream_size_mean", "content-stats", "mean raw stream length", "bytes"),
    _d("stream_size_max", "content-stats", "largest raw stream length", "bytes"),
    _d("stream_file_ratio", "content-stats", "raw stream bytes over file bytes", "ratio"),
    _d("filter_flate_count", "content-stats", "FlateDecode filter applications declared"),
    _d("filter_ascii_count", "content-stats", "ASCIIHexDecode plus ASCII85Decode filter applications declared"),
    _d("filter_other_count", "content-stats", "declared filters other than Flate/ASCIIHex/ASCII85"),
    _d("filter_cascade_count", "content-stats", "streams declaring two or more filters"),
    _d("decode_failure_count", "content-stats", "streams whose declared filters failed to decode"),
    _d("metadata_hex_run_max", "content-stats", "longest hex-digit run inside Info dictionary string values", "chars"),
    _d("js_obfuscation_score", "content-stats", "eval/unescape/String.fromCharCode/charCodeAt tokens in JavaScript payloads"),
    # metadata (6)
    _d("page_count", "metadata", "objects typed /Page, or the root page tree /Count when none parse"),
    _d("info_present", "metadata", "an Info dictionary resolves from a trailer", "flag"),
    _d("info_total_bytes", "metadata", "total byte length of Info dictionary string values", "bytes"),
    _d("info_long_tag_count", "metadata", "Info string values longer than 256 bytes"),
    _d("xmp_present", "metadata", "an XMP metadata stream is present", "flag"),
    _d("js_present", "metadata", "any /JavaScript or /JS name occurs", "flag"),
)

_SCHEMA = FeatureSchema(schema_id=SCHEMA_ID, descriptors=_DESCRIPTORS)


def describe_schema() -> FeatureSchema:
    """Return the compiled-in feature schema (stable for a given build)."""
    return _SCHEMA


def shannon_entropy(data: bytes) -> float:
    """Byte entropy in bits per byte, in [0, 8]; empty input is 0."""
    if not data:
        return 0.0
    counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
    return _entropy_from_counts(counts)


def _entropy_from_counts(counts: np.ndarray) -> float:
    total = int(counts.sum())
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log2(p)))


def extract_features(doc: PdfDocument, raw: bytes) -> FeatureVector:
    """Map a parsed document plus its raw bytes to the 48-feature vector."""
    values = np.zeros(N_FEATURES, dtype=np.float64)
    streams = [s for s in doc.iter_streams()]

    # structure
    values[0] = doc.total_size
    values[1] = _version_number(doc.header_version)
    values[2] = len(doc.objects)
    values[3] = len(streams)
    values[4] = doc.xref_section_count
    values[5] = len(doc.trailer_dicts)
    values[6] = len(doc.startxref_offsets)
    values[7] = len(doc.eof_marker_offsets)
    values[8] = _bytes_after_last_eof(doc)
    values[9] = max((_nesting_depth(v) for v in doc.objects.values()), default=0)
    values[10] = doc.diagnostic_count(DiagnosticKind.DUPLICATE_OBJECT)
    values[11] = len(doc.diagnostics)

    # object properties
    for i, entry in enumerate(_COUNTED_NAMES):
        names = entry if isinstance(entry, tuple) else (entry,)
        values[12 + i] = sum(iter_name_occurrences(doc, n) for n in names)

    # content stats
    values[28] = shannon_entropy(raw)
    values[29], values[31] = _stream_entropies(streams)
    values[30] = _entropy_outside_streams(raw, streams)
    raw_sizes = [len(s.raw) for s in streams]
    values[32] = float(np.mean(raw_sizes)) if raw_sizes else 0.0
    values[33] = max(raw_sizes, default=0)
    values[34] = (sum(raw_sizes) / doc.total_size) if doc.total_size else 0.0
    flate, ascii_, other, cascade = _filter_counts(doc, streams)
    values[35] = flate
    values[36] = ascii_
    values[37] = other
    values[38] = cascade
    values[39] = sum(1 for s in streams if s.decoded is None)
    info = _info_dict(doc)
    values[40] = _longest_hex_run(info)
    values[41] = _obfuscation_score(doc)

    # metadata
    values[42] = _page_count(doc)
    values[43] = 1.0 if info is not None else 0.0
    info_strings = _info_string_values(info)
    values[44] = sum(len(s) for s in info_strings)
    values[45] = sum(1 for s in info_strings if len(s) > 256)
    values[46] = 1.0 if _has_xmp(doc) else 0.0
    values[47] = 1.0 if (values[12] > 0 or values[13] > 0) else 0.0

    return FeatureVector(values=values, schema_id=SCHEMA_ID)


# -- helpers -------------------------------------------------------------


def _version_number(header_version: Optional[str]) -> float:
    if not header_version:
        return 0.0
    try:
        return float(header_version)
    except ValueError:
        return 0.0


def _bytes_after_last_eof(doc: PdfDocument) -> int:
    if not doc.eof_marker_offsets:
        return doc.total_size
    return max(0, doc.total_size - (max(doc.eof_marker_offsets) + 5))


def _nesting_depth(value: Any, depth: int = 0) -> int:
    if depth > 80:
        return depth
    if isinstance(value, dict):
        return 1 + max((_nesting_depth(v, depth + 1) for v in value.values()), default=0)
    if isinstance(value, list):
        return 1 + max((_nesting_depth(v, depth + 1) for v in value), default=0)
    if isinstance(value, PdfStream):
        return 1 + _nesting_depth(value.dictionary, depth + 1)
    return 0


def _stream_entropies(streams: list[PdfStream]) -> tuple[float, float]:
    """Entropy over all stream content combined, and the per-stream max.

    Streams whose filters failed keep contributing their raw bytes; an
    undecodable payload is still content.
    """
    combined = np.zeros(256, dtype=np.int64)
    per_stream_max = 0.0
    for s in streams:
        data = s.data
        if not data:
            continue
        counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
        combined += counts
        per_stream_max = max(per_stream_max, _entropy_from_counts(counts))
    return _entropy_from_counts(combined), per_stream_max


def _entropy_outside_streams(raw: bytes, streams: list[PdfStream]) -> float:
    spans = sorted(s.span for s in streams if s.span is not None)
    counts = np.zeros(256, dtype=np.int64)
    pos = 0
    for start, end in spans:
        start = max(start, pos)
        if start > pos:
            segment = raw[pos:start]
            counts += np.bincount(np.frombuffer(segment, dtype=np.uint8), minlength=256)
        pos = max(pos, end)
    if pos < len(raw):
        counts += np.bincount(np.frombuffer(raw[pos:], dtype=np.uint8), minlength=256)
    return _entropy_from_counts(counts)


def _declared_filters(doc: PdfDocument, stream: PdfStream) -> list[str]:
    filters = _resolve(doc, stream.dictionary.get("/Filter"))
    if filters is None:
        return []
    if isinstance(filters, (PdfName, str)):
        return [canonical_filter_name(filters)]
    if isinstance(filters, list):
        out = []
        for f in filters:
            f = _resolve(doc, f)
            if isinstance(f, (PdfName, str)):
                out.append(canonical_filter_name(f))
        return out
    return []


def _filter_counts(doc: PdfDocument, streams: list[PdfStream]) -> tuple[int, int, int, int]:
    flate = ascii_ = other = cascade = 0
    for s in streams:
        names = _declared_filters(doc, s)
        if len(names) >= 2:
            cascade += 1
        for name in names:
            if name == "FlateDecode":
                flate += 1
            elif name in ("ASCIIHexDecode", "ASCII85Decode"):
                ascii_ += 1
            else:
                other += 1
    return flate, ascii_, other, cascade


def _resolve(doc: PdfDocument, value: Any, depth: int = 8) -> Any:
    while isinstance(value, PdfRef) and depth > 0:
        value = doc.objects.get((value.number, value.generation))
        depth -= 1
    return None if isinstance(value, PdfRef) else value


def _iter_dicts(doc: PdfDocument) -> Iterable[dict]:
    seen: set[int] = set()
    stack: list[Any] = list(doc.trailer_dicts) + list(doc.objects.values())
    while stack:
        value = stack.pop()
        if isinstance(value, PdfStream):
            value = value.dictionary
        if isinstance(value, dict):
            if id(value) in seen:
                continue
            seen.add(id(value))
            yield value
            stack.extend(value.values())
        elif isinstance(value, list):
            if id(value) in seen:
                continue
            seen.add(id(value))
            stack.extend(value)


def _obfuscation_score(doc: PdfDocument) -> int:
    score = 0
    for d in _iter_dicts(doc):
        for key in ("/JS", "/JavaScript"):
            if key not in d:
                continue
            payload = _resolve(doc, d[key])
            if isinstance(payload, PdfString):
                data = payload.data
            elif isinstance(payload, PdfStream):
                data = payload.data
            else:
                continue
            score += sum(data.count(tok) for tok in _OBFUSCATION_TOKENS)
    return score


def _page_count(doc: PdfDocument) -> float:
    pages = 0
    for value in doc.objects.values():
        if isinstance(value, dict) and value.get("/Type") == "/Page":
            pages += 1
    if pages:
        return float(pages)
    # Fall back to the declared count in the root page tree.
    root = None
    for trailer in doc.trailer_dicts:
        if "/Root" in trailer:
            root = _resolve(doc, trailer["/Root"])
    if isinstance(root, dict):
        tree = _resolve(doc, root.get("/Pages"))
        if isinstance(tree, dict):
            count = _resolve(doc, tree.get("/Count"))
            if isinstance(count, int) and count >= 0:
                return float(count)
    for value in doc.objects.values():
        if isinstance(value, dict) and value.get("/Type") == "/Pages":
            count = _resolve(doc, value.get("/Count"))
            if isinstance(count, int) and count >= 0:
                return float(count)
    return 0.0


def _info_dict(doc: PdfDocument) -> Optional[dict]:
    found = None
    for trailer in doc.trailer_dicts:
        if "/Info" in trailer:
            candidate = _resolve(doc, trailer["/Info"])
            if isinstance(candidate, dict):
                found = candidate  # later trailers win
    return found


def _info_string_values(info: Optional[dict]) -> list[bytes]:
    if not info:
        return []
    return [v.data for v in info.values() if isinstance(v, PdfString)]


def _longest_hex_run(info: Optional[dict]) -> int:
    longest = 0
    for data in _info_string_values(info):
        run = 0
        for b in data:
            if b in _HEX_BYTES:
                run += 1
                if run > longest:
                    longest = run
            else:
                run = 0
    return longest


_HEX_BYTES = frozenset(b"0123456789abcdefABCDEF")


def _has_xmp(doc: PdfDocument) -> bool:
    for trailer in doc.trailer_dicts:
        root = _resolve(doc, trailer.get("/Root"))
        if isinstance(root, dict):
            meta = _resolve(doc, root.get("/Metadata"))
            if isinstance(meta, PdfStream):
                return True
    for value in doc.objects.values():
        if isinstance(value, PdfStream) and value.dictionary.get("/Type") == "/Metadata":
            return True
    return False
