"""Tolerant PDF parsing: object graph, stream filters, diagnostics."""

from .filters import (
    StreamDecodeError,
    UnknownFilterError,
    canonical_filter_name,
    decode_stream,
)
from .objects import (
    DiagnosticKind,
    ParseDiagnostic,
    PdfDocument,
    PdfName,
    PdfRef,
    PdfStream,
    PdfString,
)
from .parser import MAX_NESTING_DEPTH, iter_name_occurrences, parse_pdf

__all__ = [
    "DiagnosticKind",
    "MAX_NESTING_DEPTH",
    "ParseDiagnostic",
    "PdfDocument",
    "PdfName",
    "PdfRef",
    "PdfStream",
    "PdfString",
    "StreamDecodeError",
    "UnknownFilterError",
    "canonical_filter_name",
    "decode_stream",
    "iter_name_occurrences",
    "parse_pdf",
]
