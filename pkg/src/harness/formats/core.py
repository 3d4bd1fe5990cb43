"""
formats - the GridFile feature-dump format and 8-bit PGM masks.

GridFile layout (little-endian):

    offset  size  field
    0       4     magic b"SFGR"
    4       1     version (1)
    5       1     dtype code (1 = float32)
    6       12    dims C, H, W as u32
    18      4*CHW payload, row-major float32
"""

import re
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from tensor.errors import FormatError, ShapeError

MAGIC = b"SFGR"
VERSION = 1
DTYPE_F32 = 1

HEADER = np.dtype([
    ("magic", "S4"),
    ("version", "u1"),
    ("dtype", "u1"),
    ("dims", "<u4", (3,)),
])
PAYLOAD = np.dtype("<f4")

PathLike = Union[str, Path]


def encode_grid(x: np.ndarray) -> bytes:
    """Serialize a (C, H, W) grid; (H, W) grids are stored with C = 1."""
    x = np.asarray(x)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3:
        raise ShapeError(f"GridFile stores (C, H, W) grids, got shape {x.shape}.")
    header = np.zeros((), dtype=HEADER)
    header["magic"] = MAGIC
    header["version"] = VERSION
    header["dtype"] = DTYPE_F32
    header["dims"] = x.shape
    return header.tobytes() + np.ascontiguousarray(x, dtype=PAYLOAD).tobytes()


def decode_grid(buf: bytes) -> np.ndarray:
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise FormatError(f"Bad GridFile magic {bytes(buf[:4])!r}", offset=0)
    if len(buf) < HEADER.itemsize:
        raise FormatError("Truncated GridFile header", offset=len(buf))
    header = np.frombuffer(buf, dtype=HEADER, count=1)[0]
    if header["version"] != VERSION:
        raise FormatError(f"Unsupported GridFile version {header['version']}", offset=4)
    if header["dtype"] != DTYPE_F32:
        raise FormatError(f"Unsupported GridFile dtype code {header['dtype']}", offset=5)
    dims = tuple(int(d) for d in header["dims"])
    end = HEADER.itemsize + int(np.prod(dims)) * PAYLOAD.itemsize
    if len(buf) < end:
        raise FormatError(f"Truncated GridFile payload, expected {end} bytes", offset=len(buf))
    if len(buf) > end:
        raise FormatError("Trailing bytes after GridFile payload", offset=end)
    payload = np.frombuffer(buf, dtype=PAYLOAD, offset=HEADER.itemsize, count=int(np.prod(dims)))
    return payload.reshape(dims).copy()


def write_grid(path: PathLike, x: np.ndarray) -> None:
    Path(path).write_bytes(encode_grid(x))


def read_grid(path: PathLike) -> np.ndarray:
    return decode_grid(Path(path).read_bytes())


# --- PGM ---

_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _pgm_header(buf: bytes) -> Tuple[bytes, int, int, int, int]:
    fields = []
    pos = 0
    for _ in range(4):
        match = _PGM_TOKEN.match(buf, pos)
        if match is None:
            raise FormatError("Truncated PGM header", offset=len(buf))
        fields.append(match.group(1))
        pos = match.end()
    magic = fields[0]
    if magic not in (b"P5", b"P2"):
        raise FormatError(f"Not a PGM file (magic {magic!r})", offset=0)
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise FormatError("Non-numeric PGM header field", offset=pos) from None
    if not 0 < maxval < 65536 or width <= 0 or height <= 0:
        raise FormatError(f"Invalid PGM header {width}x{height} maxval {maxval}", offset=pos)
    return magic, width, height, maxval, pos


def decode_pgm(buf: bytes) -> np.ndarray:
    """Decode binary (P5) or plain (P2) PGM into floats in [0, 1]."""
    magic, width, height, maxval, pos = _pgm_header(buf)
    count = width * height
    if magic == b"P2":
        values = buf[pos:].split()
        if len(values) < count:
            raise FormatError(f"PGM has {len(values)} of {count} samples", offset=len(buf))
        data = np.array([int(v) for v in values[:count]], dtype=np.float64)
    else:
        pos += 1
        dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
        end = pos + count * dtype.itemsize
        if len(buf) < end:
            raise FormatError(f"Truncated PGM raster, expected {end} bytes", offset=len(buf))
        data = np.frombuffer(buf, dtype=dtype, offset=pos, count=count).astype(np.float64)
    return data.reshape(height, width) / maxval


def encode_pgm(x: np.ndarray) -> bytes:
    """Encode an (H, W) map in [0, 1] as 8-bit binary PGM."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3 and x.shape[0] == 1:
        x = x[0]
    if x.ndim != 2:
        raise ShapeError(f"PGM stores (H, W) maps, got shape {x.shape}.")
    raster = np.round(np.clip(x, 0.0, 1.0) * 255.0).astype(np.uint8)
    return b"P5\n%d %d\n255\n" % (x.shape[1], x.shape[0]) + raster.tobytes()


def write_pgm(path: PathLike, x: np.ndarray) -> None:
    Path(path).write_bytes(encode_pgm(x))


def read_pgm(path: PathLike) -> np.ndarray:
    return decode_pgm(Path(path).read_bytes())
