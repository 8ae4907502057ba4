"""Binary container for feature matrices, plus a CSV loader for fixtures.

Layout, little-endian throughout:

    offset  size  field
    0       6     magic b"RAFS1\\x00"
    6       2     format version, u16 (currently 1)
    8       8     n, u64
    16      8     d, u64
    24      8     t, u64 (0 means pooled; payload is then n*d)
    32      1     flags, u8 (bit 0: class token present at token index 0)
    33      31    reserved, must be zero
    64      -     payload, float32 row-major (sample, token, channel)
    ...     4     metadata length, u32
    ...     -     metadata, UTF-8 JSON

The reader refuses short files, trailing bytes, non-finite values, and
reserved bytes that are not zero, so silent truncation cannot masquerade
as a smaller dataset.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    NonFiniteValue,
    TruncatedPayload,
    ValidationError,
    VersionMismatch,
)
from .features import FeatureMeta, FeatureSet, TokenFeatureSet

MAGIC = b"RAFS1\x00"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<6sHQQQB31s")
_META_LEN = struct.Struct("<I")

assert _HEADER.size == 64


def _meta_bytes(meta: FeatureMeta) -> bytes:
    return json.dumps(meta.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_rafs(path: str | Path, fs: FeatureSet | TokenFeatureSet) -> None:
    """Serialize a pooled or token-level feature set to one file."""
    if isinstance(fs, TokenFeatureSet):
        t = fs.t
        flags = 1 if fs.cls_present else 0
    else:
        t = 0
        flags = 0
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, fs.n, fs.d, t, flags, b"\x00" * 31)
    payload = np.ascontiguousarray(fs.data, dtype="<f4").tobytes()
    meta = _meta_bytes(fs.meta)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
        fh.write(_META_LEN.pack(len(meta)))
        fh.write(meta)


def read_rafs(path: str | Path) -> FeatureSet | TokenFeatureSet:
    """Read one container; returns a TokenFeatureSet iff the file stores tokens.

    Raises:
        BadMagic: wrong leading bytes.
        VersionMismatch: unknown version or dirty reserved bytes.
        TruncatedPayload: short file or bytes past the metadata block.
        NonFiniteValue: payload holds NaN or Inf.
    """
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) or not raw.startswith(MAGIC):
        raise BadMagic(f"{path}: not a RAFS file")
    if len(raw) < _HEADER.size:
        raise TruncatedPayload(f"{path}: header cut short at {len(raw)} bytes")
    magic, version, n, d, t, flags, reserved = _HEADER.unpack_from(raw, 0)
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{path}: version {version}, expected {FORMAT_VERSION}")
    if reserved != b"\x00" * 31:
        raise VersionMismatch(f"{path}: reserved header bytes are not zero")
    if flags & ~0x01:
        raise VersionMismatch(f"{path}: unknown flag bits 0x{flags:02x}")
    if n < 1 or d < 1:
        raise ValidationError(f"{path}: header declares n={n}, d={d}")
    count = n * d if t == 0 else n * t * d
    end = _HEADER.size + 4 * count
    if len(raw) < end:
        raise TruncatedPayload(f"{path}: payload needs {end} bytes, file has {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", count=count, offset=_HEADER.size)
    if len(raw) < end + _META_LEN.size:
        raise TruncatedPayload(f"{path}: metadata length field missing")
    (meta_len,) = _META_LEN.unpack_from(raw, end)
    meta_end = end + _META_LEN.size + meta_len
    if len(raw) < meta_end:
        raise TruncatedPayload(f"{path}: metadata cut short")
    if len(raw) > meta_end:
        raise TruncatedPayload(f"{path}: {len(raw) - meta_end} trailing bytes")
    try:
        meta = FeatureMeta.from_dict(json.loads(raw[end + _META_LEN.size : meta_end].decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: bad metadata block: {exc}") from exc
    if not np.isfinite(data).all():
        raise NonFiniteValue(f"{path}: payload contains NaN or Inf")
    if t == 0:
        return FeatureSet(data.reshape(n, d).copy(), meta)
    return TokenFeatureSet(data.reshape(n, t, d).copy(), bool(flags & 1), meta)


def load_csv(path: str | Path) -> FeatureSet:
    """Load a pooled feature matrix from a headered CSV file.

    The first line names the channels and is otherwise ignored; every later
    line is one sample. Meant for small hand-written fixtures.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise ValidationError(f"{path}: need a header line and at least one sample row")
    width = len(lines[0].split(","))
    rows = []
    for ln_no, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != width:
            raise ValidationError(f"{path}:{ln_no}: expected {width} columns, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ValidationError(f"{path}:{ln_no}: {exc}") from exc
    arr = np.asarray(rows, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise NonFiniteValue(f"{path}: non-finite value in CSV payload")
    return FeatureSet(arr.astype(np.float32), FeatureMeta(source_image_count=arr.shape[0]))


def load_features(path: str | Path) -> FeatureSet | TokenFeatureSet:
    """Dispatch on file suffix: .rafs binary container, .csv headered text."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return load_csv(p)
    return read_rafs(p)
