"""Kernel distance between feature sets: unbiased squared MMD with a cubic
polynomial kernel, averaged over randomly drawn subset pairs.

For subsets X, Y of equal size s the single-pair estimate is

    (sum_offdiag K(X,X) + sum_offdiag K(Y,Y)) / (s (s - 1))
        - 2 * sum K(X,Y) / s^2

with kernel k(x, y) = (x . y / d + 1)^3. The estimate is unbiased and can
legitimately be negative near zero; the mean over subsets is reported as-is,
with the standard deviation of the per-subset estimates alongside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import cross_block_rows, map_blocks, map_ordered
from .errors import ConfigError, DimensionMismatchError, InsufficientSamplesError
from .feature_store import FeatureSet

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

DEFAULT_SUBSET_CAP = 1000
DEFAULT_NUM_SUBSETS = 100


def splitmix64(state: int) -> int:
    """Finalizer of the splitmix64 generator; a fixed 64-bit mixing function."""
    z = state & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def subset_seed(seed: int, index: int) -> int:
    """Per-subset seed: the ``index``-th output of the splitmix64 stream."""
    return splitmix64((seed + (index + 1) * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class KidConfig:
    """Estimator hyperparameters.

    subset_size None means min(1000, smaller set count), resolved at call
    time. Sampling is uniform without replacement within each subset and
    independent across subsets; subset i is seeded from (seed, i) so results
    are reproducible for any worker count.
    """

    subset_size: int | None = None
    num_subsets: int = DEFAULT_NUM_SUBSETS
    seed: int = 0

    def resolve_subset_size(self, source_count: int, target_count: int) -> int:
        limit = min(source_count, target_count)
        size = self.subset_size if self.subset_size is not None else min(
            DEFAULT_SUBSET_CAP, limit
        )
        if size < 2:
            raise ConfigError(f"subset size must be >= 2, got {size}")
        if size > limit:
            raise ConfigError(
                f"subset size {size} exceeds the smaller set count {limit}"
            )
        return size

    def validate(self) -> None:
        if self.num_subsets < 1:
            raise ConfigError(f"num_subsets must be >= 1, got {self.num_subsets}")
        if not 0 <= self.seed <= _MASK64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")


def poly_kernel(x, y, dim: int | None = None) -> float:
    """Cubic polynomial kernel (x . y / dim + 1)^3 between two vectors."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise DimensionMismatchError(
            f"vector lengths differ: {x.size} vs {y.size}"
        )
    if dim is None:
        dim = x.size
    return float((x @ y / dim + 1.0) ** 3)


def _cube_inplace(values: np.ndarray) -> np.ndarray:
    # x * x * x: measurably faster than np.power's libm route on big arrays
    squared = values * values
    squared *= values
    return squared


def _kernel_sum(x: np.ndarray, y: np.ndarray, dim: int) -> float:
    """Sum of all kernel entries k(x_i, y_j), blocked with ordered reduction."""

    def block_sum(start: int, stop: int) -> float:
        gram = x[start:stop] @ y.T
        np.divide(gram, dim, out=gram)
        gram += 1.0
        return float(_cube_inplace(gram).sum())

    parts = map_blocks(block_sum, x.shape[0], cross_block_rows(y.shape[0]))
    total = 0.0
    for part in parts:
        total += part
    return total


def _kernel_diag_sum(x: np.ndarray, dim: int) -> float:
    sq = np.einsum("ij,ij->i", x, x)
    sq /= dim
    sq += 1.0
    return float(_cube_inplace(sq).sum())


def kid_single_estimate(sub_s, sub_t) -> float:
    """Unbiased squared-MMD estimate for one pair of equal-size subsets."""
    xs = np.asarray(sub_s, dtype=np.float64)
    ys = np.asarray(sub_t, dtype=np.float64)
    if xs.ndim != 2 or ys.ndim != 2:
        raise DimensionMismatchError("subsets must be 2-D matrices")
    if xs.shape != ys.shape:
        raise DimensionMismatchError(
            f"subset shapes differ: {xs.shape} vs {ys.shape}"
        )
    s, dim = xs.shape
    if s < 2:
        raise InsufficientSamplesError(f"subset size must be >= 2, got {s}")
    within = (
        _kernel_sum(xs, xs, dim)
        - _kernel_diag_sum(xs, dim)
        + _kernel_sum(ys, ys, dim)
        - _kernel_diag_sum(ys, dim)
    )
    cross = _kernel_sum(xs, ys, dim)
    return within / (s * (s - 1)) - 2.0 * cross / (s * s)


def draw_subset_indices(
    cfg: KidConfig, source_count: int, target_count: int
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Index pairs for every subset, deterministic in (seed, subset index).

    Indices within a subset are sorted: a subset is a set, and canonical
    ordering keeps kernel sums independent of draw order (so a subset that
    happens to cover a whole feature set reproduces the full-set estimate
    exactly).
    """
    size = cfg.resolve_subset_size(source_count, target_count)
    draws = []
    for i in range(cfg.num_subsets):
        rng = np.random.Generator(np.random.Philox(key=subset_seed(cfg.seed, i)))
        idx_s = np.sort(rng.choice(source_count, size=size, replace=False))
        idx_t = np.sort(rng.choice(target_count, size=size, replace=False))
        draws.append((idx_s, idx_t))
    return draws


def kid_from_draws(
    source: FeatureSet,
    target: FeatureSet,
    draws: list[tuple[np.ndarray, np.ndarray]],
) -> tuple[float, float]:
    """Mean and standard deviation of estimates over explicit index draws."""
    # One upfront float64 cast; per-subset slices then skip their own copies.
    src = source.data.astype(np.float64)
    tgt = target.data.astype(np.float64)

    def one(draw: tuple[np.ndarray, np.ndarray]) -> float:
        idx_s, idx_t = draw
        return kid_single_estimate(src[idx_s], tgt[idx_t])

    estimates = np.array(map_ordered(one, draws), dtype=np.float64)
    return float(estimates.mean()), float(estimates.std())


def kid(
    source: FeatureSet, target: FeatureSet, cfg: KidConfig | None = None
) -> tuple[float, float]:
    """Kernel distance between two feature sets.

    Returns (mean, stddev) of the per-subset estimates. Reproducible for a
    fixed seed regardless of thread count: subsets are independent work items
    and the final reduction is ordered by subset index.
    """
    if cfg is None:
        cfg = KidConfig()
    cfg.validate()
    if source.dim != target.dim:
        raise DimensionMismatchError(
            f"source dim {source.dim} does not match target dim {target.dim}"
        )
    draws = draw_subset_indices(cfg, source.count, target.count)
    return kid_from_draws(source, target, draws)
