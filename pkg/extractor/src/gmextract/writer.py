"""GMFEAT01 writer: the binary contract with the metrics toolkit.

Layout: 8 bytes ASCII magic "GMFEAT01", uint32 LE dtype code (1 = float32),
uint64 LE row count, uint64 LE dim, then count * dim float32 values row-major.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"GMFEAT01"
DTYPE_FLOAT32 = 1
_HEADER = struct.Struct("<8sIQQ")


def write_feature_file(rows: np.ndarray, path) -> None:
    rows = np.ascontiguousarray(rows, dtype="<f4")
    if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
        raise ValueError(f"need a non-empty 2-D row matrix, got shape {rows.shape}")
    if not np.isfinite(rows).all():
        raise ValueError("feature rows contain NaN or Inf")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, DTYPE_FLOAT32, rows.shape[0], rows.shape[1]))
        fh.write(rows.tobytes())
