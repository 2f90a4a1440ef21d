"""Closeness metrics between feature distributions: FID, KID, precision/recall.

Feature sets are n x d float32 matrices moved around in the GMFEAT01 binary
format; all metric arithmetic accumulates in float64 and is deterministic for
any worker-thread count (cap it with the GENMETRICS_THREADS env variable).
"""

from .errors import (
    GenMetricsError,
    NumericalError,
    ValidationError,
)
from .feature_store import FeatureSet, normalize, read_features, write_features
from .kid import KidConfig, kid, kid_single_estimate, poly_kernel
from .moments import (
    MODE_ELEMENTWISE,
    MODE_PRODUCT,
    Moments,
    compute_moments,
    fid,
    fid_from_moments,
    sqrtm_trace,
)
from .pnr import PrConfig, knn_radii, precision_recall, region
from .report import (
    MetricReport,
    ReportRow,
    build_report,
    render_report,
    report_from_json,
    run_pair,
)
from .synth import GaussianSpec, analytic_fid, sample_gaussian

__version__ = "0.1.0"

__all__ = [
    "FeatureSet",
    "GaussianSpec",
    "GenMetricsError",
    "KidConfig",
    "MetricReport",
    "Moments",
    "MODE_ELEMENTWISE",
    "MODE_PRODUCT",
    "NumericalError",
    "PrConfig",
    "ReportRow",
    "ValidationError",
    "analytic_fid",
    "build_report",
    "compute_moments",
    "fid",
    "fid_from_moments",
    "kid",
    "kid_single_estimate",
    "knn_radii",
    "normalize",
    "poly_kernel",
    "precision_recall",
    "read_features",
    "region",
    "render_report",
    "report_from_json",
    "run_pair",
    "sample_gaussian",
    "sqrtm_trace",
    "write_features",
]
