"""Binary tensor container and base64 JSON payloads.

Binary layout (everything little-endian):
  tensor:      rank u32 | extents u32[rank] | dtype tag u8 | raw row-major data
  named table: count u32 | entries (name_len u16 | name utf8 | tensor)

dtype tags: 1 = float64, 2 = int64. The same container backs checkpoints and
search state; FILEFORMATS.md documents it for external readers.
"""

from __future__ import annotations

import base64
import struct

import numpy as np

from ..errors import FormatError

_TAGS = {1: np.dtype("<f8"), 2: np.dtype("<i8")}
_DTYPE_TO_TAG = {np.dtype(np.float64): 1, np.dtype(np.int64): 2}


def write_tensor(fh, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(arr)
    tag = _DTYPE_TO_TAG.get(arr.dtype)
    if tag is None:
        raise FormatError(f"unsupported dtype {arr.dtype}")
    fh.write(struct.pack("<I", arr.ndim))
    fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
    fh.write(struct.pack("<B", tag))
    fh.write(arr.astype(_TAGS[tag], copy=False).tobytes())


def _read_exact(fh, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated tensor payload (wanted {n} bytes, got {len(buf)})")
    return buf


def read_tensor(fh) -> np.ndarray:
    (rank,) = struct.unpack("<I", _read_exact(fh, 4))
    if rank > 32:
        raise FormatError(f"implausible tensor rank {rank}")
    shape = struct.unpack(f"<{rank}I", _read_exact(fh, 4 * rank)) if rank else ()
    (tag,) = struct.unpack("<B", _read_exact(fh, 1))
    dtype = _TAGS.get(tag)
    if dtype is None:
        raise FormatError(f"unknown dtype tag {tag}")
    count = int(np.prod(shape, dtype=np.int64)) if shape else 1
    raw = _read_exact(fh, count * dtype.itemsize)
    return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()


def write_named(fh, entries: dict[str, np.ndarray]) -> None:
    fh.write(struct.pack("<I", len(entries)))
    for name, arr in entries.items():
        blob = name.encode("utf-8")
        fh.write(struct.pack("<H", len(blob)))
        fh.write(blob)
        write_tensor(fh, arr)


def read_named(fh) -> dict[str, np.ndarray]:
    (count,) = struct.unpack("<I", _read_exact(fh, 4))
    out = {}
    for _ in range(count):
        (nlen,) = struct.unpack("<H", _read_exact(fh, 2))
        name = _read_exact(fh, nlen).decode("utf-8")
        out[name] = read_tensor(fh)
    return out


# ---- JSON payloads (corpus tracks, feature dumps) ----


def tensor_to_json(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr)
    if arr.dtype == np.int64:
        dtype = "int64"
    else:
        arr = arr.astype(np.float64, copy=False)
        dtype = "float64"
    return {
        "shape": list(arr.shape),
        "dtype": dtype,
        "data": base64.b64encode(arr.astype(f"<{'f8' if dtype == 'float64' else 'i8'}").tobytes()).decode("ascii"),
    }


def tensor_from_json(obj: dict) -> np.ndarray:
    try:
        shape = tuple(int(n) for n in obj["shape"])
        dtype = {"float64": "<f8", "int64": "<i8"}[obj["dtype"]]
        raw = base64.b64decode(obj["data"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad tensor payload: {exc}") from exc
    arr = np.frombuffer(raw, dtype=dtype)
    if arr.size != int(np.prod(shape, dtype=np.int64) if shape else 1):
        raise FormatError("tensor payload size does not match its shape")
    return arr.reshape(shape).copy()
