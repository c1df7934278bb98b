"""PDF stream filter decoders.

Supported: FlateDecode (with PNG/TIFF predictors), ASCIIHexDecode,
ASCII85Decode, RunLengthDecode and LZWDecode.  Anything else (DCTDecode,
JBIG2Decode, ...) raises UnknownFilterError so callers can keep the raw
bytes and move on.
"""

from __future__ import annotations

import base64
import zlib
from typing import Any, Optional, Sequence

__all__ = [
    "StreamDecodeError",
    "UnknownFilterError",
    "canonical_filter_name",
    "decode_stream",
]

_HEX_DIGITS = frozenset(b"0123456789abcdefABCDEF")
_WHITESPACE = frozenset(b"\x00\t\n\x0c\r ")

# Abbreviated filter names are legal inside inline images and show up in
# malformed files elsewhere too; treat them as their long forms.
_ALIASES = {
    "Fl": "FlateDecode",
    "AHx": "ASCIIHexDecode",
    "A85": "ASCII85Decode",
    "RL": "RunLengthDecode",
    "LZW": "LZWDecode",
    "CCF": "CCITTFaxDecode",
    "DCT": "DCTDecode",
}

_SUPPORTED = frozenset(
    ["FlateDecode", "ASCIIHexDecode", "ASCII85Decode", "RunLengthDecode", "LZWDecode"]
)


class StreamDecodeError(Exception):
    """A declared filter could not decode the data it was given."""

    def __init__(self, filter_name: str, message: str):
        super().__init__(f"{filter_name}: {message}")
        self.filter_name = filter_name


class UnknownFilterError(StreamDecodeError):
    """The filter name is not one this library decodes."""

    def __init__(self, filter_name: str):
        super().__init__(filter_name, "unsupported filter")


def canonical_filter_name(name: Any) -> str:
    """Normalize a /Filter entry to its long name without the slash."""
    text = str(name)
    if text.startswith("/"):
        text = text[1:]
    return _ALIASES.get(text, text)


def decode_stream(
    raw: bytes,
    filters: Sequence[Any],
    params: Any = None,
) -> bytes:
    """Apply ``filters`` to ``raw`` in declared order and return the result.

    ``filters`` holds filter names as they appear in a stream dictionary
    (with or without the leading slash, abbreviations allowed).  ``params``
    may be a single decode-parameter dictionary or a list parallel to
    ``filters``.  An empty filter list returns ``raw`` unchanged.

    Raises StreamDecodeError (UnknownFilterError for filters outside the
    supported set) and never returns partial output.
    """
    param_list = _normalize_params(params, len(filters))
    data = raw
    for name, parm in zip(filters, param_list):
        canonical = canonical_filter_name(name)
        if canonical not in _SUPPORTED:
            raise UnknownFilterError(canonical)
        if canonical == "FlateDecode":
            data = _flate_decode(data, parm)
        elif canonical == "LZWDecode":
            data = _lzw_decode_with_params(data, parm)
        elif canonical == "ASCIIHexDecode":
            data = _asciihex_decode(data)
        elif canonical == "ASCII85Decode":
            data = _ascii85_decode(data)
        else:
            data = _runlength_decode(data)
    return data


def _normalize_params(params: Any, n: int) -> list[Optional[dict]]:
    if params is None:
        return [None] * n
    if isinstance(params, dict):
        return [params] + [None] * (n - 1) if n else []
    if isinstance(params, (list, tuple)):
        out: list[Optional[dict]] = []
        for i in range(n):
            p = params[i] if i < len(params) else None
            out.append(p if isinstance(p, dict) else None)
        return out
    return [None] * n


def _param(parm: Optional[dict], key: str, default: int) -> int:
    if not parm:
        return default
    value = parm.get("/" + key, parm.get(key, default))
    return value if isinstance(value, int) else default


def _flate_decode(data: bytes, parm: Optional[dict]) -> bytes:
    try:
        out = zlib.decompress(data)
    except zlib.error:
        # Retry tolerantly: accept trailing garbage, then headerless deflate.
        try:
            d = zlib.decompressobj()
            out = d.decompress(data) + d.flush()
            if not out:
                raise zlib.error("empty")
        except zlib.error:
            try:
                d = zlib.decompressobj(wbits=-15)
                out = d.decompress(data) + d.flush()
            except zlib.error as exc:
                raise StreamDecodeError("FlateDecode", str(exc)) from exc
    return _apply_predictor(out, parm, "FlateDecode")


def _lzw_decode_with_params(data: bytes, parm: Optional[dict]) -> bytes:
    early = _param(parm, "EarlyChange", 1)
    out = _lzw_decode(data, early_change=1 if early else 0)
    return _apply_predictor(out, parm, "LZWDecode")


def _lzw_decode(data: bytes, early_change: int = 1) -> bytes:
    """Variable-width (9..12 bit) LZW with clear code 256 and EOD 257."""
    CLEAR, EOD = 256, 257
    out = bytearray()
    table: list[bytes] = []
    bits = 9
    prev: Optional[bytes] = None

    def reset() -> None:
        nonlocal table, bits, prev
        table = [bytes([i]) for i in range(256)] + [b"", b""]
        bits = 9
        prev = None

    reset()
    acc = 0
    nbits = 0
    for byte in data:
        acc = (acc << 8) | byte
        nbits += 8
        while nbits >= bits:
            nbits -= bits
            code = (acc >> nbits) & ((1 << bits) - 1)
            if code == CLEAR:
                reset()
                continue
            if code == EOD:
                return bytes(out)
            if prev is None:
                if code >= len(table):
                    raise StreamDecodeError("LZWDecode", f"bad initial code {code}")
                entry = table[code]
            elif code < len(table):
                entry = table[code]
                table.append(prev + entry[:1])
            elif code == len(table):
                entry = prev + prev[:1]
                table.append(entry)
            else:
                raise StreamDecodeError("LZWDecode", f"code {code} out of range")
            out += entry
            prev = entry
            if len(table) + early_change >= (1 << bits) and bits < 12:
                bits += 1
    return bytes(out)


def _asciihex_decode(data: bytes) -> bytes:
    digits = bytearray()
    for byte in data:
        if byte == 0x3E:  # ">"
            break
        if byte in _WHITESPACE:
            continue
        if byte not in _HEX_DIGITS:
            raise StreamDecodeError("ASCIIHexDecode", f"invalid byte 0x{byte:02x}")
        digits.append(byte)
    if len(digits) % 2:
        digits.append(0x30)  # odd count: final digit is the high nibble
    return bytes.fromhex(digits.decode("ascii"))


def _ascii85_decode(data: bytes) -> bytes:
    body = bytes(b for b in data if b not in _WHITESPACE)
    if body.startswith(b"<~"):
        body = body[2:]
    end = body.find(b"~>")
    if end != -1:
        body = body[:end]
    try:
        return base64.a85decode(body, adobe=False)
    except ValueError as exc:
        raise StreamDecodeError("ASCII85Decode", str(exc)) from exc


def _runlength_decode(data: bytes) -> bytes:
    out = bytearray()
    i = 0
    n = len(data)
    while i < n:
        length = data[i]
        if length == 128:  # EOD
            return bytes(out)
        if length < 128:
            chunk = data[i + 1 : i + 2 + length]
            if len(chunk) != length + 1:
                raise StreamDecodeError("RunLengthDecode", "literal run truncated")
            out += chunk
            i += 2 + length
        else:
            if i + 1 >= n:
                raise StreamDecodeError("RunLengthDecode", "repeat run truncated")
            out += bytes([data[i + 1]]) * (257 - length)
            i += 2
    # Missing EOD is tolerated; everything decoded so far is complete.
    return bytes(out)


def _apply_predictor(data: bytes, parm: Optional[dict], filter_name: str) -> bytes:
    predictor = _param(parm, "Predictor", 1)
    if predictor <= 1:
        return data
    colors = _param(parm, "Colors", 1)
    bpc = _param(parm, "BitsPerComponent", 8)
    columns = _param(parm, "Columns", 1)
    if predictor == 2:
        return _tiff_predictor(data, colors, bpc, columns, filter_name)
    if predictor >= 10:
        return _png_predictor(data, colors, bpc, columns, filter_name)
    raise StreamDecodeError(filter_name, f"unsupported predictor {predictor}")


def _tiff_predictor(data: bytes, colors: int, bpc: int, columns: int, who: str) -> bytes:
    if bpc != 8:
        raise StreamDecodeError(who, f"TIFF predictor with {bpc} bits per component")
    row_len = colors * columns
    if row_len <= 0 or len(data) % row_len:
        raise StreamDecodeError(who, "predictor row size mismatch")
    out = bytearray(data)
    for row_start in range(0, len(out), row_len):
        for i in range(row_start + colors, row_start + row_len):
            out[i] = (out[i] + out[i - colors]) & 0xFF
    return bytes(out)


def _png_predictor(data: bytes, colors: int, bpc: int, columns: int, who: str) -> bytes:
    bpp = max(1, (colors * bpc) // 8)
    row_len = (colors * bpc * columns + 7) // 8
    stride = row_len + 1  # each row is prefixed with its filter type
    if row_len <= 0 or len(data) % stride:
        raise StreamDecodeError(who, "predictor row size mismatch")
    out = bytearray()
    prev = bytearray(row_len)
    for row_start in range(0, len(data), stride):
        ftype = data[row_start]
        row = bytearray(data[row_start + 1 : row_start + stride])
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(bpp, row_len):
                row[i] = (row[i] + row[i - bpp]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(row_len):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(row_len):
                left = row[i - bpp] if i >= bpp else 0
                row[i] = (row[i] + (left + prev[i]) // 2) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(row_len):
                left = row[i - bpp] if i >= bpp else 0
                up = prev[i]
                up_left = prev[i - bpp] if i >= bpp else 0
                row[i] = (row[i] + _paeth(left, up, up_left)) & 0xFF
        else:
            raise StreamDecodeError(who, f"unknown PNG row filter {ftype}")
        out += row
        prev = row
    return bytes(out)


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c
