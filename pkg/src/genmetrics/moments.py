"""Mean/covariance statistics and the Frechet distance between two feature sets.

The score is

    ||mu_S - mu_T||^2 + Tr(Cov_S) + Tr(Cov_T) - 2 * Tr(sqrt(Cov_S x Cov_T))

where the square-root term has two readings of the covariance combination:
``product`` (the matrix product, the standard Frechet distance, and the
default) and ``elementwise`` (the Hadamard product). Both are exposed; see
``sqrtm_trace``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import map_blocks
from .errors import (
    AsymmetricMatrixError,
    DimensionMismatchError,
    InsufficientSamplesError,
    NegativeMetricError,
    NotPositiveSemidefiniteError,
)
from .feature_store import FeatureSet

MODE_PRODUCT = "product"
MODE_ELEMENTWISE = "elementwise"
_MODES = (MODE_PRODUCT, MODE_ELEMENTWISE)

# Eigenvalues in [-clamp * lambda_max, 0) are rounded up to zero; anything
# more negative means the matrix is genuinely not PSD and is an error.
EIGENVALUE_CLAMP_REL = 1e-10
SYMMETRY_REL_TOL = 1e-9
FID_NEGATIVE_TOL = 1e-6

_MOMENT_BLOCK_ROWS = 4096


@dataclass(frozen=True, eq=False)
class Moments:
    """Sample mean vector and covariance matrix of a feature set."""

    mean: np.ndarray
    cov: np.ndarray
    count: int

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.cov, dtype=np.float64)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        if self.count < 2:
            raise InsufficientSamplesError(
                f"moments need at least 2 samples, got {self.count}"
            )
        _check_symmetric(cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def _check_symmetric(m: np.ndarray) -> None:
    scale = float(np.abs(m).max()) if m.size else 0.0
    worst = float(np.abs(m - m.T).max())
    if worst > SYMMETRY_REL_TOL * max(scale, 1e-300):
        raise AsymmetricMatrixError(
            f"matrix asymmetry {worst:.3g} exceeds tolerance at scale {scale:.3g}"
        )


def compute_moments(features: FeatureSet) -> Moments:
    """Sample mean and covariance (divisor count - 1) of a feature set.

    Accumulates in float64 over fixed-size row blocks combined in ascending
    block order, so the result is bit-identical for any worker count.
    """
    n = features.count
    if n < 2:
        raise InsufficientSamplesError(f"need at least 2 rows, got {n}")
    data = features.data

    def block_sums(start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        block = data[start:stop].astype(np.float64)
        return block.sum(axis=0), block.T @ block

    partials = map_blocks(block_sums, n, _MOMENT_BLOCK_ROWS)
    total = partials[0][0].copy()
    gram = partials[0][1].copy()
    for vec, mat in partials[1:]:
        total += vec
        gram += mat

    mean = total / n
    cov = (gram - n * np.outer(mean, mean)) / (n - 1)
    cov = (cov + cov.T) / 2.0
    return Moments(mean=mean, cov=cov, count=n)


def _clamped_eigvals(values: np.ndarray, context: str) -> np.ndarray:
    top = float(values.max()) if values.size else 0.0
    floor = -EIGENVALUE_CLAMP_REL * max(top, 0.0)
    lowest = float(values.min()) if values.size else 0.0
    if lowest < floor:
        raise NotPositiveSemidefiniteError(
            f"{context}: eigenvalue {lowest:.6g} below clamp floor {floor:.6g}"
        )
    return np.clip(values, 0.0, None)


def _psd_sqrt(matrix: np.ndarray, context: str) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    roots = np.sqrt(_clamped_eigvals(values, context))
    half = (vectors * roots) @ vectors.T
    return (half + half.T) / 2.0


def sqrtm_trace(a: np.ndarray, b: np.ndarray, mode: str = MODE_PRODUCT) -> float:
    """Trace of the PSD matrix square root of the combination of ``a`` and ``b``.

    ``product`` mode returns Tr((a b)^(1/2)), evaluated through the symmetric
    form a^(1/2) b a^(1/2) so only symmetric eigensolvers are involved.
    ``elementwise`` mode returns Tr(sqrt(a o b)) where ``o`` is the Hadamard
    product (symmetric and PSD whenever a and b are, by the Schur product
    theorem).

    Raises:
        AsymmetricMatrixError: an input departs from symmetry beyond tolerance.
        NotPositiveSemidefiniteError: an eigenvalue falls below the clamp floor.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(
            f"expected two square matrices of equal shape, got {a.shape} and {b.shape}"
        )
    _check_symmetric(a)
    _check_symmetric(b)
    a = (a + a.T) / 2.0
    b = (b + b.T) / 2.0

    if mode == MODE_ELEMENTWISE:
        inner = a * b
    else:
        a_half = _psd_sqrt(a, "first covariance")
        inner = a_half @ b @ a_half
        inner = (inner + inner.T) / 2.0

    values = np.linalg.eigvalsh(inner)
    values = _clamped_eigvals(values, "combined covariance")
    return float(np.sqrt(values).sum())


def fid_from_moments(s: Moments, t: Moments, mode: str = MODE_PRODUCT) -> float:
    """Frechet distance between two Gaussians given by their moments."""
    if s.dim != t.dim:
        raise DimensionMismatchError(
            f"source dim {s.dim} does not match target dim {t.dim}"
        )
    diff = s.mean - t.mean
    value = (
        float(diff @ diff)
        + float(np.trace(s.cov))
        + float(np.trace(t.cov))
        - 2.0 * sqrtm_trace(s.cov, t.cov, mode)
    )
    if value < 0.0:
        if value < -FID_NEGATIVE_TOL:
            raise NegativeMetricError(
                f"FID computed as {value:.6g}, beyond the rounding tolerance"
            )
        value = 0.0
    return value


def fid(source: FeatureSet, target: FeatureSet, mode: str = MODE_PRODUCT) -> float:
    """Frechet distance between the moment estimates of two feature sets."""
    if source.dim != target.dim:
        raise DimensionMismatchError(
            f"source dim {source.dim} does not match target dim {target.dim}"
        )
    return fid_from_moments(compute_moments(source), compute_moments(target), mode)
