"""Feature-vector container, the GMFEAT01 on-disk format, and L2 normalization.

File layout (all integers little-endian):

    bytes 0..7    magic, ASCII "GMFEAT01"
    bytes 8..11   dtype code, uint32 (1 = float32, the only defined value)
    bytes 12..19  row count, uint64
    bytes 20..27  feature dimension, uint64
    bytes 28..    payload: count * dim float32 values, row-major

A valid file is exactly 28 + count * dim * 4 bytes long.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagicError,
    EmptyDimensionsError,
    NonFiniteValueError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    ValidationError,
    ZeroNormRowError,
)

MAGIC = b"GMFEAT01"
DTYPE_FLOAT32 = 1
HEADER_SIZE = 28
_HEADER_STRUCT = struct.Struct("<8sIQQ")

_UNIT_NORM_TOL = 1e-5


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """An n x d matrix of feature vectors plus provenance metadata.

    Rows are individual feature vectors, stored float32 (computations
    accumulate in float64). Instances are immutable and safe to share
    across threads; the underlying array is marked read-only.
    """

    data: np.ndarray
    label: str = ""
    normalized: bool = False
    _skip_checks: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise EmptyDimensionsError(
                f"feature data must be 2-D, got shape {arr.shape}"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise EmptyDimensionsError(
                f"count and dim must both be >= 1, got shape {arr.shape}"
            )
        if arr.dtype != np.float32:
            arr = arr.astype(np.float32)
        if not self._skip_checks:
            if not np.isfinite(arr).all():
                raise NonFiniteValueError("feature data contains NaN or Inf entries")
            if self.normalized:
                norms = np.linalg.norm(arr.astype(np.float64), axis=1)
                worst = float(np.abs(norms - 1.0).max())
                if worst > _UNIT_NORM_TOL:
                    raise ValidationError(
                        f"normalized flag set but a row norm deviates from 1.0 "
                        f"by {worst:.3g}"
                    )
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "_skip_checks", False)

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def write_features(features: FeatureSet, path) -> None:
    """Write a FeatureSet to ``path`` in the GMFEAT01 format."""
    header = _HEADER_STRUCT.pack(
        MAGIC, DTYPE_FLOAT32, features.count, features.dim
    )
    payload = np.ascontiguousarray(features.data, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_features(path, label: str | None = None) -> FeatureSet:
    """Read a GMFEAT01 file back into a FeatureSet.

    Restores the stored values bit-exactly, row-major order preserved. The
    normalized flag is always False on read; the format does not persist it.

    Raises:
        BadMagicError: leading 8 bytes are not "GMFEAT01".
        UnsupportedDtypeError: dtype code is not 1 (float32).
        EmptyDimensionsError: stored count or dim is zero.
        TruncatedPayloadError: file length differs from the header's promise.
        NonFiniteValueError: payload contains NaN or Inf.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE or raw[:8] != MAGIC:
        raise BadMagicError(f"{path}: not a GMFEAT01 file")
    magic, dtype_code, count, dim = _HEADER_STRUCT.unpack_from(raw)
    if dtype_code != DTYPE_FLOAT32:
        raise UnsupportedDtypeError(
            f"{path}: dtype code {dtype_code} is not supported (expected 1)"
        )
    if count == 0 or dim == 0:
        raise EmptyDimensionsError(f"{path}: header declares count={count}, dim={dim}")
    expected = HEADER_SIZE + count * dim * 4
    if len(raw) != expected:
        raise TruncatedPayloadError(
            f"{path}: expected {expected} bytes for {count}x{dim} float32, "
            f"found {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE).reshape(count, dim)
    if not np.isfinite(data).all():
        raise NonFiniteValueError(f"{path}: payload contains NaN or Inf entries")
    if label is None:
        label = str(path)
    return FeatureSet(data=data.copy(), label=label, normalized=False)


def normalize(features: FeatureSet) -> FeatureSet:
    """Project every row onto the unit sphere (divide by its L2 norm).

    Count, dim, and label are unchanged; the normalized flag is set. Norms
    are computed in float64 before the rows are divided.

    Raises:
        ZeroNormRowError: some row has zero norm, reported by row index.
    """
    data64 = features.data.astype(np.float64)
    norms = np.linalg.norm(data64, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        raise ZeroNormRowError(
            f"row {int(zero_rows[0])} has zero norm and cannot be normalized"
        )
    scaled = (data64 / norms[:, None]).astype(np.float32)
    return FeatureSet(
        data=scaled,
        label=features.label,
        normalized=True,
        _skip_checks=True,
    )
