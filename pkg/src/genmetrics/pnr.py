"""Manifold precision and recall from exact k-nearest-neighbor radii.

A point x lies inside the manifold of a set f when, for at least one y in f,

    ||x - y||^2 < q * ||NN_k(y) - y||^2

(strict inequality, self excluded from the neighbor search). Precision is the
fraction of source rows inside the target manifold; recall is the fraction of
target rows inside the source manifold. Every distance is computed exactly via
the Gram expansion ||x - y||^2 = ||x||^2 + ||y||^2 - 2 x.y with float64
accumulation, blocked over query rows; no approximate indexes.

Note the strict inequality: duplicated points have radius zero and accept
nothing at q = 1. That follows directly from the definition and is left as-is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import cross_block_rows, map_blocks
from .errors import ConfigError, DimensionMismatchError, InsufficientSamplesError
from .feature_store import FeatureSet


@dataclass(frozen=True)
class PrConfig:
    """Neighborhood size k and radius multiplier q."""

    k: int = 3
    q: float = 1.0

    def validate(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not self.q > 0:
            raise ConfigError(f"q must be > 0, got {self.q}")


def _squared_distance_block(
    queries: np.ndarray, refs: np.ndarray, ref_sq: np.ndarray
) -> np.ndarray:
    """Exact squared Euclidean distances from each query row to every ref row."""
    q64 = queries.astype(np.float64)
    query_sq = np.einsum("ij,ij->i", q64, q64)
    gram = q64 @ refs.T
    dists = query_sq[:, None] + ref_sq[None, :] - 2.0 * gram
    np.clip(dists, 0.0, None, out=dists)
    return dists


def knn_radii(features: FeatureSet, k: int) -> np.ndarray:
    """Squared distance from each row to its k-th nearest neighbor in the set.

    The row itself is excluded. Exact: all pairwise distances are evaluated.

    Raises:
        InsufficientSamplesError: the set has fewer than k + 1 rows.
    """
    n = features.count
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if n <= k:
        raise InsufficientSamplesError(
            f"k-th neighbor needs at least {k + 1} rows, got {n}"
        )
    refs = features.data.astype(np.float64)
    ref_sq = np.einsum("ij,ij->i", refs, refs)

    def block_radii(start: int, stop: int) -> np.ndarray:
        dists = _squared_distance_block(features.data[start:stop], refs, ref_sq)
        rows = np.arange(start, stop)
        dists[rows - start, rows] = np.inf
        dists.partition(k - 1, axis=1)
        return dists[:, k - 1].copy()

    parts = map_blocks(block_radii, n, cross_block_rows(n))
    return np.concatenate(parts)


def region(x, features: FeatureSet, radii: np.ndarray, q: float = 1.0) -> int:
    """1 if x falls inside the q-scaled neighbor ball of any row, else 0."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if x.shape[1] != features.dim:
        raise DimensionMismatchError(
            f"query length {x.shape[1]} does not match set dim {features.dim}"
        )
    refs = features.data.astype(np.float64)
    ref_sq = np.einsum("ij,ij->i", refs, refs)
    dists = _squared_distance_block(x, refs, ref_sq)
    return int(bool((dists[0] < q * radii).any()))


def _fraction_inside(
    queries: FeatureSet, refs: FeatureSet, radii: np.ndarray, q: float
) -> float:
    """Fraction of query rows inside the manifold spanned by refs."""
    ref64 = refs.data.astype(np.float64)
    ref_sq = np.einsum("ij,ij->i", ref64, ref64)
    thresholds = q * radii

    def block_hits(start: int, stop: int) -> int:
        dists = _squared_distance_block(queries.data[start:stop], ref64, ref_sq)
        return int((dists < thresholds[None, :]).any(axis=1).sum())

    parts = map_blocks(block_hits, queries.count, cross_block_rows(refs.count))
    return sum(parts) / queries.count


def precision_recall(
    source: FeatureSet, target: FeatureSet, cfg: PrConfig | None = None
) -> tuple[float, float]:
    """Manifold precision and recall between two feature sets.

    Both values are exact and deterministic; swapping the arguments swaps the
    two results, because each direction is the identical computation with the
    roles exchanged.
    """
    if cfg is None:
        cfg = PrConfig()
    cfg.validate()
    if source.dim != target.dim:
        raise DimensionMismatchError(
            f"source dim {source.dim} does not match target dim {target.dim}"
        )
    radii_target = knn_radii(target, cfg.k)
    radii_source = knn_radii(source, cfg.k)
    precision = _fraction_inside(source, target, radii_target, cfg.q)
    recall = _fraction_inside(target, source, radii_source, cfg.q)
    return precision, recall
