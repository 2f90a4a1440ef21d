"""Exception hierarchy shared by every genmetrics module.

Each error carries a short machine-readable ``code`` so the CLI can report
failures on stderr in a stable, scriptable form. ``ValidationError`` subclasses
map to exit status 2 (bad input), everything else to exit status 1.
"""

from __future__ import annotations


class GenMetricsError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ValidationError(GenMetricsError):
    """Invalid input: bad file, bad configuration, violated precondition."""

    code = "invalid-input"


class FeatureFileError(ValidationError):
    code = "bad-feature-file"


class BadMagicError(FeatureFileError):
    code = "bad-magic"


class UnsupportedDtypeError(FeatureFileError):
    code = "unsupported-dtype"


class TruncatedPayloadError(FeatureFileError):
    code = "truncated-payload"


class EmptyDimensionsError(ValidationError):
    code = "empty-dimensions"


class NonFiniteValueError(ValidationError):
    code = "non-finite-values"


class ZeroNormRowError(ValidationError):
    code = "zero-norm-row"


class DimensionMismatchError(ValidationError):
    code = "dimension-mismatch"


class InsufficientSamplesError(ValidationError):
    code = "insufficient-samples"


class ConfigError(ValidationError):
    code = "invalid-config"


class NumericalError(GenMetricsError):
    """Numeric failure while computing a metric (not an input-format issue)."""

    code = "numerical-error"


class AsymmetricMatrixError(NumericalError):
    code = "asymmetric-matrix"


class NotPositiveSemidefiniteError(NumericalError):
    code = "not-positive-semidefinite"


class NegativeMetricError(NumericalError):
    code = "negative-metric"
