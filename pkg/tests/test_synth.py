import numpy as np
import pytest

from genmetrics.errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    NotPositiveSemidefiniteError,
)
from genmetrics.synth import (
    GENERATOR_NAME,
    GaussianSpec,
    analytic_fid,
    sample_gaussian,
    standard_normals,
)


class TestSampling:
    def test_same_spec_is_bit_identical(self):
        spec = GaussianSpec(
            mean=np.array([1.0, -2.0]),
            cov=np.array([[2.0, 0.3], [0.3, 1.0]]),
            seed=123,
            count=500,
        )
        a = sample_gaussian(spec)
        b = sample_gaussian(spec)
        assert a.data.tobytes() == b.data.tobytes()
        assert a.label == b.label

    def test_different_seeds_differ(self):
        base = dict(mean=np.zeros(3), cov=np.eye(3), count=100)
        a = sample_gaussian(GaussianSpec(seed=1, **base))
        b = sample_gaussian(GaussianSpec(seed=2, **base))
        assert a.data.tobytes() != b.data.tobytes()

    def test_zero_covariance_reproduces_mean_exactly(self):
        mean = np.array([0.25, -1.5, 3.0])
        spec = GaussianSpec(mean=mean, cov=np.zeros((3, 3)), seed=7, count=10)
        rows = sample_gaussian(spec).data
        assert (rows == mean.astype(np.float32)).all()

    def test_label_records_generator(self):
        spec = GaussianSpec(mean=np.zeros(2), cov=np.eye(2), seed=5, count=8)
        assert GENERATOR_NAME in sample_gaussian(spec).label

    def test_scalar_moments_at_large_count(self):
        spec = GaussianSpec(
            mean=np.zeros(1), cov=np.eye(1), seed=99, count=50000
        )
        rows = sample_gaussian(spec).data.astype(np.float64)
        assert abs(rows.mean()) < 0.02
        assert abs(rows.var(ddof=1) - 1.0) < 0.03

    def test_non_psd_covariance_rejected(self):
        spec = GaussianSpec(
            mean=np.zeros(2), cov=np.diag([1.0, -1.0]), seed=0, count=10
        )
        with pytest.raises(NotPositiveSemidefiniteError):
            sample_gaussian(spec)

    def test_count_below_two_rejected(self):
        with pytest.raises(InsufficientSamplesError):
            GaussianSpec(mean=np.zeros(2), cov=np.eye(2), seed=0, count=1)

    def test_output_satisfies_feature_set_contract(self):
        spec = GaussianSpec(mean=np.zeros(4), cov=np.eye(4), seed=3, count=64)
        out = sample_gaussian(spec)
        assert out.data.dtype == np.float32
        assert np.isfinite(out.data).all()
        assert (out.count, out.dim) == (64, 4)

    def test_normal_stream_is_deterministic_and_standard(self):
        a = standard_normals(seed=31, n=100001)
        b = standard_normals(seed=31, n=100001)
        assert a.tobytes() == b.tobytes()
        assert abs(a.mean()) < 0.02
        assert abs(a.std() - 1.0) < 0.02


class TestAnalyticFid:
    def test_identical_specs(self):
        spec = GaussianSpec(
            mean=np.array([1.0, 2.0]),
            cov=np.array([[2.0, 0.5], [0.5, 1.0]]),
            seed=0,
            count=10,
        )
        assert analytic_fid(spec, spec) == pytest.approx(0.0, abs=1e-12)

    def test_scalar_closed_form(self):
        a = GaussianSpec(mean=np.zeros(1), cov=np.eye(1), seed=0, count=10)
        b = GaussianSpec(mean=np.ones(1), cov=np.eye(1), seed=0, count=10)
        assert analytic_fid(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_commuting_diagonal_closed_form(self):
        a = GaussianSpec(
            mean=np.zeros(2), cov=np.diag([1.0, 4.0]), seed=0, count=10
        )
        b = GaussianSpec(
            mean=np.array([1.0, 2.0]), cov=np.diag([9.0, 1.0]), seed=0, count=10
        )
        assert analytic_fid(a, b) == pytest.approx(10.0, abs=1e-12)

    def test_dimension_mismatch(self):
        a = GaussianSpec(mean=np.zeros(1), cov=np.eye(1), seed=0, count=10)
        b = GaussianSpec(mean=np.zeros(2), cov=np.eye(2), seed=0, count=10)
        with pytest.raises(DimensionMismatchError):
            analytic_fid(a, b)
