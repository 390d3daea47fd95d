"""Feature cache files.

Layout (little-endian)::

    b"FCACHE01"
    u32 N, u32 D, u32 K          rows, feature dim, number of classes
    u16 L, L bytes               extractor id, UTF-8
    N * u32                      labels
    N * D * f32                  values, row-major
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError
from ..featurex import FeatureMatrix

MAGIC = b"FCACHE01"
_HEADER = struct.Struct("<III")


def features_to_bytes(fm: FeatureMatrix) -> bytes:
    fid = fm.extractor_id.encode("utf-8")
    if len(fid) > 0xFFFF:
        raise ValueError("extractor id too long")
    return b"".join(
        [
            MAGIC,
            _HEADER.pack(fm.rows, fm.dim, fm.n_classes),
            struct.pack("<H", len(fid)),
            fid,
            np.asarray(fm.labels, dtype="<u4").tobytes(),
            np.ascontiguousarray(fm.values, dtype="<f4").tobytes(),
        ]
    )


def features_from_bytes(data: bytes) -> FeatureMatrix:
    if data[: len(MAGIC)] != MAGIC:
        raise FormatError("not a feature cache file (bad magic)")
    pos = len(MAGIC)
    if len(data) < pos + _HEADER.size + 2:
        raise FormatError("feature cache header is truncated")
    n, d, k = _HEADER.unpack_from(data, pos)
    pos += _HEADER.size
    (id_len,) = struct.unpack_from("<H", data, pos)
    pos += 2
    expected = pos + id_len + 4 * n + 4 * n * d
    if len(data) != expected:
        raise FormatError(f"feature cache has {len(data)} bytes, layout requires {expected}")
    fid = data[pos : pos + id_len].decode("utf-8")
    pos += id_len
    labels = np.frombuffer(data, dtype="<u4", count=n, offset=pos).astype(np.int64)
    pos += 4 * n
    values = np.frombuffer(data, dtype="<f4", count=n * d, offset=pos).astype(np.float32).reshape(n, d)
    try:
        return FeatureMatrix(values, labels, fid, k)
    except ValueError as exc:
        raise FormatError(f"feature cache content is invalid: {exc}") from exc


def save_features(path: str | Path, fm: FeatureMatrix) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(features_to_bytes(fm))
    tmp.replace(path)


def load_features(path: str | Path) -> FeatureMatrix:
    return features_from_bytes(Path(path).read_bytes())
