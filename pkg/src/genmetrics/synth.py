"""Seeded synthetic Gaussian feature sets and the closed-form distance oracle.

Sampling is fully specified so identical specs reproduce bit-identical output:
raw 64-bit words come from the counter-based Philox4x64-10 generator keyed by
the seed, uniforms take the top 53 bits, and standard normals are produced by
the Box-Muller transform (r = sqrt(-2 ln(1 - u1)), angle 2 pi u2, cos/sin pair
interleaved). Rows are mean + L z with L a factor of the covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InsufficientSamplesError
from .feature_store import FeatureSet
from .moments import (
    FID_NEGATIVE_TOL,
    MODE_PRODUCT,
    NegativeMetricError,
    _check_symmetric,
    _clamped_eigvals,
    sqrtm_trace,
)

GENERATOR_NAME = "philox4x64-10+box-muller"


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    """Mean, covariance, seed, and sample count of a synthetic population."""

    mean: np.ndarray
    cov: np.ndarray
    seed: int
    count: int

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.cov, dtype=np.float64)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        _check_symmetric(cov)
        if self.count < 2:
            raise InsufficientSamplesError(
                f"count must be >= 2, got {self.count}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def standard_normals(seed: int, n: int) -> np.ndarray:
    """n standard-normal float64 variates from the documented Philox chain."""
    pairs = (n + 1) // 2
    raw = np.random.Philox(key=seed).random_raw(2 * pairs)
    u1 = (raw[0::2] >> 11) * 2.0**-53
    u2 = (raw[1::2] >> 11) * 2.0**-53
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs, dtype=np.float64)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:n]


def _covariance_factor(cov: np.ndarray) -> np.ndarray:
    """A matrix L with L L^T = cov; Cholesky when positive definite, else an
    eigenvalue factor so singular PSD covariances (e.g. all zeros) sample too."""
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        values, vectors = np.linalg.eigh(cov)
        roots = np.sqrt(_clamped_eigvals(values, "sampling covariance"))
        return vectors * roots


def sample_gaussian(spec: GaussianSpec) -> FeatureSet:
    """Draw spec.count rows from the specified Gaussian, deterministically."""
    z = standard_normals(spec.seed, spec.count * spec.dim)
    z = z.reshape(spec.count, spec.dim)
    factor = _covariance_factor(spec.cov)
    rows = spec.mean + z @ factor.T
    label = (
        f"gaussian({GENERATOR_NAME}, seed={spec.seed}, "
        f"n={spec.count}, d={spec.dim})"
    )
    return FeatureSet(data=rows.astype(np.float32), label=label)


def analytic_fid(a: GaussianSpec, b: GaussianSpec) -> float:
    """Closed-form Frechet distance between two Gaussians from true parameters."""
    if a.dim != b.dim:
        raise DimensionMismatchError(
            f"spec dims differ: {a.dim} vs {b.dim}"
        )
    diff = a.mean - b.mean
    value = (
        float(diff @ diff)
        + float(np.trace(a.cov))
        + float(np.trace(b.cov))
        - 2.0 * sqrtm_trace(a.cov, b.cov, MODE_PRODUCT)
    )
    if value < 0.0:
        if value < -FID_NEGATIVE_TOL:
            raise NegativeMetricError(
                f"analytic distance computed as {value:.6g}"
            )
        value = 0.0
    return value
