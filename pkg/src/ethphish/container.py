"""Deterministic binary container shared by graph snapshots, datasets and checkpoints.

Layout (all integers little-endian)::

    8 bytes   magic  b"ETHPHSH\\x00"
    4 bytes   uint32 format version (currently 1)
    4 bytes   uint32 length of the kind tag
    N bytes   kind tag, ASCII ("graph", "dataset", "checkpoint")
    8 bytes   uint64 length H of the JSON header
    H bytes   UTF-8 JSON header, keys sorted, no whitespace
    ...       array payloads, concatenated in header order

The header carries user metadata under ``"meta"`` and an ``"arrays"`` list of
``{"name", "dtype", "shape", "offset", "nbytes"}`` records; offsets count from
the first payload byte. Arrays are stored C-contiguous in little-endian byte
order. Nothing time- or host-dependent is written, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import FormatError

MAGIC = b"ETHPHSH\x00"
VERSION = 1


def _le(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    if arr.dtype.byteorder == ">" or (arr.dtype.byteorder == "=" and not np.little_endian):
        arr = arr.astype(arr.dtype.newbyteorder("<"))
    return arr


def encode(kind: str, meta: Mapping[str, Any], arrays: Mapping[str, np.ndarray]) -> bytes:
    entries = []
    payloads = []
    offset = 0
    for name, arr in arrays.items():
        arr = _le(np.asarray(arr))
        if arr.dtype == object:
            raise FormatError(f"array {name!r} has object dtype")
        raw = arr.tobytes()
        entries.append({
            "name": name,
            "dtype": arr.dtype.str.replace(">", "<").replace("=", "<"),
            "shape": list(arr.shape),
            "offset": offset,
            "nbytes": len(raw),
        })
        payloads.append(raw)
        offset += len(raw)
    header = json.dumps({"meta": dict(meta), "arrays": entries},
                        sort_keys=True, separators=(",", ":")).encode("utf-8")
    tag = kind.encode("ascii")
    return b"".join([
        MAGIC,
        struct.pack("<I", VERSION),
        struct.pack("<I", len(tag)),
        tag,
        struct.pack("<Q", len(header)),
        header,
        *payloads,
    ])


def decode(blob: bytes, kind: str | None = None) -> tuple[dict, dict[str, np.ndarray]]:
    if blob[:8] != MAGIC:
        raise FormatError("not an ethphish container (bad magic)")
    pos = 8
    (version,) = struct.unpack_from("<I", blob, pos)
    pos += 4
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    (tag_len,) = struct.unpack_from("<I", blob, pos)
    pos += 4
    tag = blob[pos:pos + tag_len].decode("ascii")
    pos += tag_len
    if kind is not None and tag != kind:
        raise FormatError(f"expected a {kind!r} container, found {tag!r}")
    (hlen,) = struct.unpack_from("<Q", blob, pos)
    pos += 8
    try:
        header = json.loads(blob[pos:pos + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"corrupt header: {exc}") from exc
    pos += hlen
    arrays = {}
    for entry in header["arrays"]:
        start = pos + entry["offset"]
        end = start + entry["nbytes"]
        if end > len(blob):
            raise FormatError(f"truncated payload for array {entry['name']!r}")
        arr = np.frombuffer(blob[start:end], dtype=np.dtype(entry["dtype"]))
        arrays[entry["name"]] = arr.reshape(entry["shape"]).copy()
    return header["meta"], arrays


def write(path: str | Path, kind: str, meta: Mapping[str, Any],
          arrays: Mapping[str, np.ndarray]) -> None:
    Path(path).write_bytes(encode(kind, meta, arrays))


def read(path: str | Path, kind: str | None = None) -> tuple[dict, dict[str, np.ndarray]]:
    return decode(Path(path).read_bytes(), kind)


def pack_strings(items) -> tuple[np.ndarray, np.ndarray]:
    """Encode a sequence of str as (utf-8 byte blob, int64 offsets of length n+1)."""
    encoded = [s.encode("utf-8") for s in items]
    offsets = np.zeros(len(encoded) + 1, dtype=np.int64)
    if encoded:
        offsets[1:] = np.cumsum([len(b) for b in encoded])
    blob = np.frombuffer(b"".join(encoded), dtype=np.uint8) if encoded else np.zeros(0, np.uint8)
    return blob, offsets


def unpack_strings(blob: np.ndarray, offsets: np.ndarray) -> list[str]:
    raw = blob.tobytes()
    return [raw[offsets[i]:offsets[i + 1]].decode("utf-8") for i in range(len(offsets) - 1)]
