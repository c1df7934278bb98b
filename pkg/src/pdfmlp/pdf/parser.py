"""Recovery-first PDF parser.

Malicious PDFs are malformed on purpose, so this parser never trusts the
cross-reference table and never raises: it scans the whole input linearly
for "N G obj" headers, recovers stream extents by searching for the
endstream keyword whenever /Length is wrong, unpacks object streams, and
records every anomaly as a ParseDiagnostic on the returned PdfDocument.

The trade-off is deliberate: a best-effort object graph with diagnostics
is far more useful for feature extraction than a strict parse that dies
on the first corrupt byte.
"""

from __future__ import annotations

import re
from typing import Any, Optional

from .filters import StreamDecodeError, UnknownFilterError, decode_stream
from .objects import (
    DiagnosticKind,
    ParseDiagnostic,
    PdfDocument,
    PdfName,
    PdfRef,
    PdfStream,
    PdfString,
)

__all__ = ["parse_pdf", "iter_name_occurrences", "MAX_NESTING_DEPTH"]

MAX_NESTING_DEPTH = 64

_WS = b"\x00\t\n\x0c\r "
_WS_SET = frozenset(_WS)
_REGULAR_END = _WS_SET | frozenset(b"()<>[]{}/%")

_OBJ_RE = re.compile(
    rb"(\d{1,10})[\x00\t\n\x0c\r ]+(\d{1,5})[\x00\t\n\x0c\r ]+obj(?![0-9A-Za-z])"
)
_XREF_RE = re.compile(rb"(?<![A-Za-z])xref(?![0-9A-Za-z])")
_TRAILER_RE = re.compile(rb"(?<![A-Za-z])trailer(?![0-9A-Za-z])")
_STARTXREF_RE = re.compile(rb"(?<![A-Za-z])startxref(?![0-9A-Za-z])")
_EOF_RE = re.compile(rb"%%EOF")
_HEADER_RE = re.compile(rb"%PDF-(\d+(?:\.\d+)?)")
_NUMBER_RE = re.compile(rb"[+-]?(?:\d+(?:\.\d*)?|\.\d+)")
_REF_TAIL_RE = re.compile(rb"[\x00\t\n\x0c\r ]+(\d{1,10})[\x00\t\n\x0c\r ]+R(?![0-9A-Za-z])")
_XREF_ENTRY_RE = re.compile(rb"(\d{10})[\x00\t\n\x0c\r ](\d{5})[\x00\t\n\x0c\r ]([nf])")
_KEYWORD_RE = re.compile(rb"[A-Za-z]{1,32}")
_UINT_RE = re.compile(rb"\d{1,15}")

# Keywords that terminate a value context instead of being values.
_STOP_KEYWORDS = frozenset(
    [b"endobj", b"endstream", b"obj", b"stream", b"trailer", b"startxref", b"xref"]
)

# Streams larger than this after decoding are treated as decode failures;
# it bounds memory under decompression-bomb inputs.
_MAX_DECODED = 1 << 26


class _Truncated(Exception):
    pass


class _DepthExceeded(Exception):
    pass


class _StopKeyword(Exception):
    """A structural keyword was found where a value was expected."""


class _Terminator(Exception):
    """A stray ']' or '>>' was consumed in value position."""

    def __init__(self, which: bytes):
        self.which = which


class _Scanner:
    """Cursor over the raw bytes with the token-level primitives."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def at_end(self) -> bool:
        return self.pos >= len(self.data)

    def peek(self) -> int:
        return self.data[self.pos] if self.pos < len(self.data) else -1

    def skip_ws(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            b = data[self.pos]
            if b in _WS_SET:
                self.pos += 1
            elif b == 0x25:  # '%' comment runs to end of line
                eol = self.pos
                while eol < n and data[eol] not in (0x0D, 0x0A):
                    eol += 1
                self.pos = eol
            else:
                break

    def starts_with(self, token: bytes) -> bool:
        return self.data.startswith(token, self.pos)

    def read_uint(self) -> Optional[int]:
        m = _UINT_RE.match(self.data, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return int(m.group())

    # -- value parsing -----------------------------------------------------

    def parse_value(self, depth: int) -> Any:
        if depth > MAX_NESTING_DEPTH:
            raise _DepthExceeded
        while True:
            self.skip_ws()
            if self.at_end():
                raise _Truncated
            b = self.peek()
            if b == 0x3C:  # '<'
                if self.data.startswith(b"<<", self.pos):
                    return self.parse_dict(depth + 1)
                return self.read_hex_string()
            if b == 0x3E:  # '>'
                if self.data.startswith(b">>", self.pos):
                    self.pos += 2
                    raise _Terminator(b">>")
                self.pos += 1
                continue
            if b == 0x5B:  # '['
                self.pos += 1
                return self.parse_array(depth + 1)
            if b == 0x5D:  # ']'
                self.pos += 1
                raise _Terminator(b"]")
            if b == 0x2F:  # '/'
                return self.read_name()
            if b == 0x28:  # '('
                return self.read_literal_string()
            if 0x30 <= b <= 0x39 or b in (0x2B, 0x2D, 0x2E):  # digit + - .
                return self.read_number()
            if (0x41 <= b <= 0x5A) or (0x61 <= b <= 0x7A):
                value = self.read_keyword()
                if value is not _SKIPPED:
                    return value
                continue
            # Unparseable byte (braces, stray delimiters, binary junk).
            self.pos += 1

    def parse_dict(self, depth: int) -> dict:
        self.pos += 2  # consume '<<'
        out: dict = {}
        while True:
            self.skip_ws()
            if self.at_end():
                raise _Truncated
            if self.data.startswith(b">>", self.pos):
                self.pos += 2
                return out
            if self.peek() == 0x2F:
                key = self.read_name()
                try:
                    out[key] = self.parse_value(depth)
                except _Terminator as t:
                    if t.which == b">>":
                        return out
                    continue  # stray ']' consumed; drop the key
            else:
                # Junk where a key belongs: consume one value and move on.
                try:
                    self.parse_value(depth)
                except _Terminator as t:
                    if t.which == b">>":
                        return out

    def parse_array(self, depth: int) -> list:
        out: list = []
        while True:
            self.skip_ws()
            if self.at_end():
                raise _Truncated
            if self.peek() == 0x5D:
                self.pos += 1
                return out
            try:
                out.append(self.parse_value(depth))
            except _Terminator as t:
                if t.which == b"]":
                    return out
                # Stray '>>' inside an array: consumed, keep going.

    def read_number(self) -> Any:
        m = _NUMBER_RE.match(self.data, self.pos)
        if not m:
            self.pos += 1
            return None
        text = m.group()
        self.pos = m.end()
        if b"." in text:
            try:
                return float(text)
            except ValueError:
                return 0.0
        value = int(text)
        if text[:1] not in (b"+", b"-"):
            tail = _REF_TAIL_RE.match(self.data, self.pos)
            if tail:
                self.pos = tail.end()
                return PdfRef(value, int(tail.group(1)))
        return value

    def read_keyword(self) -> Any:
        m = _KEYWORD_RE.match(self.data, self.pos)
        word = m.group()
        if word in _STOP_KEYWORDS:
            raise _StopKeyword  # leave the keyword unconsumed
        self.pos = m.end()
        if word == b"true":
            return True
        if word == b"false":
            return False
        if word == b"null":
            return None
        return _SKIPPED

    def read_name(self) -> PdfName:
        self.pos += 1  # consume '/'
        data, n = self.data, len(self.data)
        raw = bytearray()
        while self.pos < n:
            b = data[self.pos]
            if b in _REGULAR_END:
                break
            if b == 0x23 and self.pos + 2 < n:  # '#xx' escape
                pair = data[self.pos + 1 : self.pos + 3]
                try:
                    raw.append(int(pair, 16))
                    self.pos += 3
                    continue
                except ValueError:
                    pass
            raw.append(b)
            self.pos += 1
        return PdfName("/" + raw.decode("latin-1"))

    def read_literal_string(self) -> PdfString:
        self.pos += 1  # consume '('
        data, n = self.data, len(self.data)
        out = bytearray()
        depth = 1
        while self.pos < n:
            b = data[self.pos]
            if b == 0x5C:  # backslash
                self.pos += 1
                if self.pos >= n:
                    break
                e = data[self.pos]
                mapped = _STRING_ESCAPES.get(e)
                if mapped is not None:
                    out.append(mapped)
                    self.pos += 1
                elif 0x30 <= e <= 0x37:  # octal, up to three digits
                    octal = 0
                    k = 0
                    while k < 3 and self.pos < n and 0x30 <= data[self.pos] <= 0x37:
                        octal = octal * 8 + (data[self.pos] - 0x30)
                        self.pos += 1
                        k += 1
                    out.append(octal & 0xFF)
                elif e in (0x0D, 0x0A):  # line continuation
                    self.pos += 1
                    if e == 0x0D and self.pos < n and data[self.pos] == 0x0A:
                        self.pos += 1
                else:
                    out.append(e)
                    self.pos += 1
            elif b == 0x28:  # '('
                depth += 1
                out.append(b)
                self.pos += 1
            elif b == 0x29:  # ')'
                depth -= 1
                self.pos += 1
                if depth == 0:
                    return PdfString(bytes(out), hex=False)
                out.append(b)
            else:
                out.append(b)
                self.pos += 1
        raise _Truncated

    def read_hex_string(self) -> PdfString:
        self.pos += 1  # consume '<'
        data, n = self.data, len(self.data)
        digits = bytearray()
        while self.pos < n:
            b = data[self.pos]
            self.pos += 1
            if b == 0x3E:  # '>'
                if len(digits) % 2:
                    digits.append(0x30)
                return PdfString(bytes.fromhex(digits.decode("ascii")), hex=True)
            if b in _HEX_SET:
                digits.append(b)
            # anything else (whitespace or junk) is skipped
        raise _Truncated


_SKIPPED = object()
_HEX_SET = frozenset(b"0123456789abcdefABCDEF")
_STRING_ESCAPES = {
    0x6E: 0x0A,  # \n
    0x72: 0x0D,  # \r
    0x74: 0x09,  # \t
    0x62: 0x08,  # \b
    0x66: 0x0C,  # \f
    0x28: 0x28,  # \(
    0x29: 0x29,  # \)
    0x5C: 0x5C,  # \\
}


class _DocumentParser:
    def __init__(self, data: bytes):
        self.data = data
        self.diags: list[ParseDiagnostic] = []
        self.objects: dict[tuple[int, int], Any] = {}
        self.object_offsets: dict[tuple[int, int], int] = {}
        self.extents: list[tuple[int, int]] = []

    def diag(self, offset: int, kind: DiagnosticKind, detail: str = "") -> None:
        offset = max(0, min(offset, len(self.data)))
        self.diags.append(ParseDiagnostic(offset, kind, detail))

    # -- top level -----------------------------------------------------------

    def parse(self) -> PdfDocument:
        data = self.data
        if not data:
            self.diag(0, DiagnosticKind.TRUNCATED, "empty input")
            return PdfDocument(total_size=0, diagnostics=self.diags)

        header_version = self._parse_header()
        self._scan_objects()
        trailer_dicts = self._scan_xref_and_trailers()
        startxref_offsets = self._scan_startxref()
        eof_offsets = [m.start() for m in _EOF_RE.finditer(data) if self._outside(m.start())]
        self._expand_object_streams()

        xref_streams = self._xref_stream_trailers()
        all_trailers = sorted(trailer_dicts + xref_streams, key=lambda pair: pair[0])

        return PdfDocument(
            header_version=header_version,
            objects=self.objects,
            trailer_dicts=[d for _, d in all_trailers],
            xref_section_count=self.xref_section_count + len(xref_streams),
            startxref_offsets=startxref_offsets,
            eof_marker_offsets=eof_offsets,
            total_size=len(data),
            diagnostics=self.diags,
        )

    def _parse_header(self) -> Optional[str]:
        m = _HEADER_RE.search(self.data, 0, 1024 + 16)
        if m and m.start() < 1024:
            return m.group(1).decode("ascii")
        self.diag(0, DiagnosticKind.GARBAGE_BYTES, "no %PDF- header in first 1024 bytes")
        return None

    # -- pass 1: linear object scan -------------------------------------------

    def _scan_objects(self) -> None:
        cursor = 0
        for m in _OBJ_RE.finditer(self.data):
            if m.start() < cursor:
                continue
            key = (int(m.group(1)), int(m.group(2)))
            value, end = self._parse_object_body(m.end())
            if key in self.objects:
                self.diag(
                    m.start(),
                    DiagnosticKind.DUPLICATE_OBJECT,
                    f"object {key[0]} {key[1]} redefined; keeping the later definition",
                )
            self.objects[key] = value
            self.object_offsets[key] = m.start()
            self.extents.append((m.start(), end))
            cursor = end

    def _parse_object_body(self, pos: int) -> tuple[Any, int]:
        sc = _Scanner(self.data, pos)
        value = self._parse_value_tolerant(sc, pos)
        sc.skip_ws()
        if isinstance(value, dict) and sc.starts_with(b"stream"):
            value = self._read_stream(sc, value)
        sc.skip_ws()
        if sc.starts_with(b"endobj"):
            sc.pos += 6
        elif not sc.at_end():
            self.diag(sc.pos, DiagnosticKind.GARBAGE_BYTES, "expected endobj")
        return value, sc.pos

    def _parse_value_tolerant(self, sc: _Scanner, at: int) -> Any:
        try:
            return sc.parse_value(0)
        except _StopKeyword:
            return None
        except _Terminator:
            return None
        except _Truncated:
            self.diag(len(self.data), DiagnosticKind.TRUNCATED, "object runs past end of input")
            return None
        except _DepthExceeded:
            self.diag(at, DiagnosticKind.GARBAGE_BYTES, f"nesting deeper than {MAX_NESTING_DEPTH}")
            recovery = self.data.find(b"endobj", sc.pos)
            sc.pos = recovery if recovery != -1 else len(self.data)
            return None

    def _read_stream(self, sc: _Scanner, dictionary: dict) -> PdfStream:
        data = self.data
        keyword_at = sc.pos
        sc.pos += 6  # consume 'stream'
        if data.startswith(b"\r\n", sc.pos):
            sc.pos += 2
        elif data[sc.pos : sc.pos + 1] in (b"\n", b"\r"):
            sc.pos += 1
        start = sc.pos

        declared = dictionary.get("/Length")
        end: Optional[int] = None
        after: Optional[int] = None
        if isinstance(declared, int) and declared >= 0 and start + declared <= len(data):
            follow = self._endstream_after(start + declared)
            if follow is not None:
                end = start + declared
                after = follow
        if end is None:
            found = data.find(b"endstream", start)
            if found == -1:
                self.diag(keyword_at, DiagnosticKind.TRUNCATED, "stream without endstream")
                end = len(data)
                after = len(data)
            else:
                end = found
                # A single EOL before endstream belongs to the syntax, not the data.
                if data.endswith(b"\r\n", start, end):
                    end -= 2
                elif end > start and data[end - 1 : end] in (b"\n", b"\r"):
                    end -= 1
                after = found + 9
            if isinstance(declared, int):
                self.diag(
                    keyword_at,
                    DiagnosticKind.BAD_LENGTH,
                    f"/Length {declared} is wrong; recovered {end - start} bytes",
                )
            elif declared is None:
                self.diag(keyword_at, DiagnosticKind.BAD_LENGTH, "stream without /Length")
            # an indirect /Length is legal; recovery by scan needs no diagnostic
        sc.pos = after

        raw = data[start:end]
        decoded = self._decode(dictionary, raw, keyword_at)
        return PdfStream(dictionary=dictionary, raw=raw, decoded=decoded, span=(start, end))

    def _endstream_after(self, pos: int) -> Optional[int]:
        """Position just past 'endstream' if it follows pos (EOL allowed)."""
        data = self.data
        if data.startswith(b"\r\n", pos):
            pos += 2
        elif data[pos : pos + 1] in (b"\n", b"\r"):
            pos += 1
        if data.startswith(b"endstream", pos):
            return pos + 9
        return None

    def _decode(self, dictionary: dict, raw: bytes, at: int) -> Optional[bytes]:
        filters = dictionary.get("/Filter")
        if filters is None:
            return raw
        if isinstance(filters, (PdfName, str)):
            filters = [filters]
        if not isinstance(filters, list):
            self.diag(at, DiagnosticKind.DECODE_ERROR, "unusable /Filter entry")
            return None
        names = []
        for f in filters:
            if not isinstance(f, (PdfName, str)):
                self.diag(at, DiagnosticKind.DECODE_ERROR, "unusable /Filter entry")
                return None
            names.append(str(f))
        params = dictionary.get("/DecodeParms", dictionary.get("/DP"))
        try:
            decoded = decode_stream(raw, names, params)
        except UnknownFilterError as exc:
            self.diag(at, DiagnosticKind.UNKNOWN_FILTER, exc.filter_name)
            return None
        except StreamDecodeError as exc:
            self.diag(at, DiagnosticKind.DECODE_ERROR, str(exc))
            return None
        except Exception as exc:  # pragma: no cover - belt and braces
            self.diag(at, DiagnosticKind.DECODE_ERROR, f"unexpected: {exc}")
            return None
        if len(decoded) > _MAX_DECODED:
            self.diag(at, DiagnosticKind.DECODE_ERROR, "decoded output exceeds size cap")
            return None
        return decoded

    # -- pass 2: xref tables, trailers, startxref ------------------------------

    def _outside(self, offset: int) -> bool:
        lo, hi = 0, len(self.extents)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.extents[mid][0] <= offset:
                lo = mid + 1
            else:
                hi = mid
        if lo == 0:
            return True
        return offset >= self.extents[lo - 1][1]

    def _scan_xref_and_trailers(self) -> list[tuple[int, dict]]:
        trailers: list[tuple[int, dict]] = []
        consumed_trailer_offsets: set[int] = set()
        self.xref_section_count = 0
        for m in _XREF_RE.finditer(self.data):
            if not self._outside(m.start()):
                continue
            self.xref_section_count += 1
            self._parse_xref_table(m, trailers, consumed_trailer_offsets)
        for m in _TRAILER_RE.finditer(self.data):
            if not self._outside(m.start()) or m.start() in consumed_trailer_offsets:
                continue
            entry = self._parse_trailer_dict(m.start())
            if entry is not None:
                trailers.append(entry)
        return trailers

    def _parse_xref_table(
        self,
        m: re.Match,
        trailers: list[tuple[int, dict]],
        consumed: set[int],
    ) -> None:
        data = self.data
        sc = _Scanner(data, m.end())
        mismatches = 0
        entries = 0
        while True:
            sc.skip_ws()
            if sc.starts_with(b"trailer"):
                consumed.add(sc.pos)
                entry = self._parse_trailer_dict(sc.pos)
                if entry is not None:
                    trailers.append(entry)
                break
            first = sc.read_uint()
            if first is None:
                self.diag(m.start(), DiagnosticKind.BAD_XREF, "cross-reference table without trailer")
                break
            sc.skip_ws()
            count = sc.read_uint()
            if count is None:
                self.diag(m.start(), DiagnosticKind.BAD_XREF, "malformed subsection header")
                break
            count = min(count, max(0, (len(data) - sc.pos) // 18 + 1))
            broken = False
            for i in range(count):
                sc.skip_ws()
                em = _XREF_ENTRY_RE.match(data, sc.pos)
                if not em:
                    self.diag(sc.pos, DiagnosticKind.BAD_XREF, "malformed table entry")
                    broken = True
                    break
                sc.pos = em.end()
                entries += 1
                if em.group(3) == b"n" and not self._entry_resolves(
                    int(em.group(1)), first + i, int(em.group(2))
                ):
                    mismatches += 1
            if broken:
                break
        if mismatches:
            self.diag(
                m.start(),
                DiagnosticKind.BAD_XREF,
                f"{mismatches} of {entries} in-use entries do not point at their object",
            )

    def _entry_resolves(self, offset: int, number: int, generation: int) -> bool:
        if offset >= len(self.data):
            return False
        sc = _Scanner(self.data, offset)
        sc.skip_ws()
        om = _OBJ_RE.match(self.data, sc.pos)
        return bool(om) and int(om.group(1)) == number and int(om.group(2)) == generation

    def _parse_trailer_dict(self, keyword_at: int) -> Optional[tuple[int, dict]]:
        sc = _Scanner(self.data, keyword_at + 7)
        sc.skip_ws()
        if not sc.starts_with(b"<<"):
            self.diag(keyword_at, DiagnosticKind.BAD_XREF, "trailer without dictionary")
            return None
        try:
            return keyword_at, sc.parse_dict(1)
        except (_Truncated, _DepthExceeded, _StopKeyword, _Terminator):
            self.diag(keyword_at, DiagnosticKind.TRUNCATED, "unterminated trailer dictionary")
            return None

    def _scan_startxref(self) -> list[int]:
        offsets: list[int] = []
        data = self.data
        for m in _STARTXREF_RE.finditer(data):
            if not self._outside(m.start()):
                continue
            sc = _Scanner(data, m.end())
            sc.skip_ws()
            value = sc.read_uint()
            if value is None:
                self.diag(m.start(), DiagnosticKind.BAD_XREF, "startxref without offset")
                continue
            offsets.append(value)
            if value >= len(data):
                self.diag(m.start(), DiagnosticKind.BAD_XREF, f"startxref {value} is past end of file")
                continue
            target = _Scanner(data, value)
            target.skip_ws()
            b = target.peek()
            if not (target.starts_with(b"xref") or 0x30 <= b <= 0x39):
                self.diag(
                    m.start(),
                    DiagnosticKind.BAD_XREF,
                    f"startxref {value} does not point at cross-reference data",
                )
        return offsets

    def _xref_stream_trailers(self) -> list[tuple[int, dict]]:
        found = []
        for key, value in self.objects.items():
            if isinstance(value, PdfStream) and value.dictionary.get("/Type") == "/XRef":
                found.append((self.object_offsets.get(key, 0), value.dictionary))
        return found

    # -- pass 3: object streams -----------------------------------------------

    def _expand_object_streams(self) -> None:
        containers = [
            (key, value)
            for key, value in self.objects.items()
            if isinstance(value, PdfStream) and value.dictionary.get("/Type") == "/ObjStm"
        ]
        for key, stream in containers:
            at = self.object_offsets.get(key, 0)
            if stream.decoded is None:
                continue  # the decode failure already has its diagnostic
            count = stream.dictionary.get("/N")
            first = stream.dictionary.get("/First")
            if (
                not isinstance(count, int)
                or not isinstance(first, int)
                or count < 0
                or first < 0
                or first > len(stream.decoded)
            ):
                self.diag(at, DiagnosticKind.GARBAGE_BYTES, "malformed object stream header")
                continue
            pairs = self._objstm_pairs(stream.decoded[:first], min(count, 10_000), at)
            for number, rel in pairs:
                target = first + rel
                if target > len(stream.decoded):
                    self.diag(at, DiagnosticKind.GARBAGE_BYTES, "object stream offset out of range")
                    continue
                sc = _Scanner(stream.decoded, target)
                try:
                    value = sc.parse_value(0)
                except (_Truncated, _DepthExceeded, _StopKeyword, _Terminator):
                    self.diag(at, DiagnosticKind.GARBAGE_BYTES, "unparseable object inside object stream")
                    value = None
                inner = (number, 0)
                if inner in self.objects:
                    self.diag(
                        at,
                        DiagnosticKind.DUPLICATE_OBJECT,
                        f"object {number} 0 redefined by object stream",
                    )
                self.objects[inner] = value
                self.object_offsets.setdefault(inner, at)

    def _objstm_pairs(self, header: bytes, count: int, at: int) -> list[tuple[int, int]]:
        sc = _Scanner(header, 0)
        pairs: list[tuple[int, int]] = []
        for _ in range(count):
            sc.skip_ws()
            number = sc.read_uint()
            sc.skip_ws()
            rel = sc.read_uint()
            if number is None or rel is None:
                self.diag(at, DiagnosticKind.GARBAGE_BYTES, "short object stream index")
                break
            pairs.append((number, rel))
        return pairs


def parse_pdf(data: bytes) -> PdfDocument:
    """Parse any byte input into a PdfDocument.

    Total by contract: anomalies become diagnostics and hopeless inputs
    yield an empty document, never an exception.
    """
    try:
        return _DocumentParser(bytes(data)).parse()
    except Exception as exc:  # pragma: no cover - safety net, see fuzz tests
        return PdfDocument(
            total_size=len(data),
            diagnostics=[
                ParseDiagnostic(0, DiagnosticKind.GARBAGE_BYTES, f"internal parser error: {exc!r}")
            ],
        )


def iter_name_occurrences(doc: PdfDocument, name: str) -> int:
    """Count how often a canonical name appears as a dict key or value.

    The query may be written with or without the leading slash; names in
    the document were canonicalized (#xx escapes resolved) at parse time,
    so obfuscated spellings are already folded in.  Objects unpacked from
    object streams are part of the object map and therefore counted.
    """
    target = name if name.startswith("/") else "/" + name
    seen: set[int] = set()
    count = 0

    def walk(value: Any) -> None:
        nonlocal count
        if isinstance(value, PdfName):
            if value == target:
                count += 1
        elif isinstance(value, dict):
            if id(value) in seen:
                return
            seen.add(id(value))
            for key, item in value.items():
                if isinstance(key, PdfName) and key == target:
                    count += 1
                walk(item)
        elif isinstance(value, list):
            if id(value) in seen:
                return
            seen.add(id(value))
            for item in value:
                walk(item)
        elif isinstance(value, PdfStream):
            walk(value.dictionary)

    for trailer in doc.trailer_dicts:
        walk(trailer)
    for obj in doc.objects.values():
        walk(obj)
    return count
