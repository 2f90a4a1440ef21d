"""Acceptance gate: one test per release criterion, each at its pinned
tolerance, each printing a PASS line on success.

Run with: pytest tests/test_acceptance.py -v -s
"""

import time

import numpy as np
import pytest
import scipy.linalg

from genmetrics.feature_store import FeatureSet
from genmetrics.kid import KidConfig, kid, kid_single_estimate
from genmetrics.moments import MODE_PRODUCT, fid, sqrtm_trace
from genmetrics.pnr import PrConfig, precision_recall
from genmetrics.report import MetricReport, ReportRow, render_report, second_better_markers
from genmetrics.synth import GaussianSpec, analytic_fid, sample_gaussian

from oracles import naive_kid_estimate, naive_precision_recall


def _pass(name: str) -> None:
    print(f"\nACCEPTANCE PASS: {name}", flush=True)


def _random_psd(rng: np.random.Generator, d: int, ridge: float = 0.5) -> np.ndarray:
    a = rng.standard_normal((d, d))
    m = a @ a.T / d + ridge * np.eye(d)
    return (m + m.T) / 2.0


def test_gaussian_fid_oracle():
    """Sample FID within 5% of the closed form, 5 random pairs, < 10 s."""
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    d, n = 8, 20000
    for _ in range(5):
        def spec() -> GaussianSpec:
            return GaussianSpec(
                mean=rng.standard_normal(d),
                cov=_random_psd(rng, d),
                seed=int(rng.integers(1 << 62)),
                count=n,
            )

        a, b = spec(), spec()
        sample_value = fid(sample_gaussian(a), sample_gaussian(b), MODE_PRODUCT)
        true_value = analytic_fid(a, b)
        assert abs(sample_value - true_value) <= 0.05 * true_value
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"oracle run took {elapsed:.1f}s"
    _pass(f"gaussian fid oracle (5 pairs, worst-case within 5%, {elapsed:.2f}s)")


def test_fid_identity():
    """fid(S, S) <= 1e-9 for a random 5000 x 64 set."""
    rng = np.random.default_rng(99)
    s = FeatureSet(rng.standard_normal((5000, 64)).astype(np.float32))
    value = fid(s, s, MODE_PRODUCT)
    assert value <= 1e-9
    _pass(f"fid identity (value {value:.3g})")


def test_sqrtm_trace_oracle():
    """Matches a Schur-based dense reference within 1e-8 relative, 50 pairs."""
    rng = np.random.default_rng(7)
    for _ in range(50):
        d = int(rng.integers(2, 17))
        a = _random_psd(rng, d, ridge=float(rng.uniform(0.05, 1.0)))
        b = _random_psd(rng, d, ridge=float(rng.uniform(0.05, 1.0)))
        ours = sqrtm_trace(a, b, MODE_PRODUCT)
        ref = float(np.trace(scipy.linalg.sqrtm(a @ b)).real)
        assert abs(ours - ref) <= 1e-8 * abs(ref)
    _pass("sqrtm trace oracle (50 random PSD pairs, d <= 16, 1e-8 relative)")


def test_kid_hand_instance():
    """The two-point instance evaluates to -2.375 exactly in float64."""
    sub = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert kid_single_estimate(sub, sub) == -2.375
    _pass("kid hand instance (exactly -2.375)")


def test_kid_unbiasedness():
    """|mean| <= 3 stderr over 200 subset estimates, same distribution, < 30 s."""
    started = time.perf_counter()
    cov = np.diag(np.linspace(0.5, 2.0, 16))
    a = sample_gaussian(GaussianSpec(np.zeros(16), cov, seed=1001, count=2000))
    b = sample_gaussian(GaussianSpec(np.zeros(16), cov, seed=1002, count=2000))
    mean, stddev = kid(a, b, KidConfig(subset_size=100, num_subsets=200, seed=7))
    stderr = stddev / np.sqrt(200)
    assert abs(mean) <= 3.0 * stderr, f"mean {mean:.3g} vs stderr {stderr:.3g}"
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"unbiasedness run took {elapsed:.1f}s"
    _pass(
        f"kid unbiasedness (|mean| = {abs(mean) / stderr:.2f} stderr, {elapsed:.2f}s)"
    )


def test_kid_oracle():
    """Matches the naive double-loop estimate, 100 instances, s <= 32."""
    rng = np.random.default_rng(15)
    for _ in range(100):
        s = int(rng.integers(2, 33))
        d = int(rng.integers(1, 16))
        xs = rng.standard_normal((s, d))
        ys = rng.standard_normal((s, d)) + rng.normal(scale=2.0)
        got = kid_single_estimate(xs, ys)
        ref = naive_kid_estimate(xs, ys)
        assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))
    _pass("kid oracle (100 random instances, 1e-9 relative)")


def test_pnr_oracle():
    """Exact match with the brute-force reference, 100 instances."""
    rng = np.random.default_rng(58)
    checked = 0
    while checked < 100:
        n = int(rng.integers(5, 65))
        m = int(rng.integers(5, 65))
        d = int(rng.integers(1, 8))
        k = int(rng.choice([1, 3]))
        if min(n, m) <= k:
            continue
        q = float(rng.choice([0.5, 1.0, 2.0]))
        a = FeatureSet(rng.standard_normal((n, d)).astype(np.float32))
        b = FeatureSet((rng.standard_normal((m, d)) + rng.normal()).astype(np.float32))
        assert precision_recall(a, b, PrConfig(k=k, q=q)) == naive_precision_recall(
            a.data, b.data, k, q
        )
        checked += 1
    _pass("precision/recall oracle (100 random instances, exact)")


def test_pnr_identity():
    """precision = recall = 1.0 when source is target, no duplicate rows."""
    rng = np.random.default_rng(12)
    data = rng.standard_normal((2000, 16)).astype(np.float32)
    assert len(np.unique(data, axis=0)) == 2000
    s = FeatureSet(data)
    assert precision_recall(s, s, PrConfig(k=3, q=1.0)) == (1.0, 1.0)
    _pass("precision/recall identity (n=2000, d=16)")


def test_determinism_across_thread_counts(monkeypatch):
    """fid/kid/pr bit-identical for 1, 2, 4, 8 worker threads, fixed seed."""
    rng = np.random.default_rng(31)
    a = FeatureSet(rng.standard_normal((2000, 64)).astype(np.float32))
    b = FeatureSet(rng.standard_normal((2000, 64)).astype(np.float32))
    kid_cfg = KidConfig(subset_size=200, num_subsets=20, seed=3)
    pr_cfg = PrConfig(k=3, q=1.0)
    results = []
    for threads in ("1", "2", "4", "8"):
        monkeypatch.setenv("GENMETRICS_THREADS", threads)
        results.append(
            (
                fid(a, b, MODE_PRODUCT),
                kid(a, b, kid_cfg),
                precision_recall(a, b, pr_cfg),
            )
        )
    assert all(r == results[0] for r in results)
    _pass("determinism across thread counts {1, 2, 4, 8}")


def test_pipeline_performance():
    """fid + kid + pr on 10k x 2048 float32 pairs completes within 60 s."""
    rng = np.random.default_rng(1)
    source = FeatureSet(rng.standard_normal((10000, 2048)).astype(np.float32))
    target = FeatureSet(
        (rng.standard_normal((10000, 2048)) * 1.05 + 0.02).astype(np.float32)
    )
    started = time.perf_counter()
    fid_value = fid(source, target, MODE_PRODUCT)
    kid_value = kid(source, target, KidConfig(seed=0))
    pr_value = precision_recall(source, target, PrConfig())
    elapsed = time.perf_counter() - started
    assert np.isfinite(fid_value)
    assert np.isfinite(kid_value[0])
    assert all(0.0 <= v <= 1.0 for v in pr_value)
    assert elapsed < 60.0, f"pipeline took {elapsed:.1f}s"
    _pass(f"pipeline performance (10k x 2048 in {elapsed:.1f}s)")


_REFERENCE_ROWS = [
    ("InceptionV3", ("StyleGAN2", 4.721, 0.0018, 0.684, 0.413),
     ("ProjectedGAN", 4.520, 0.0009, 0.659, 0.479)),
    ("CLIP", ("StyleGAN2", 2.173, 0.0053, 0.736, 0.361),
     ("ProjectedGAN", 4.111, 0.0087, 0.605, 0.349)),
    ("DINOv2", ("StyleGAN2", 53.307, 0.1012, 0.538, 0.172),
     ("ProjectedGAN", 64.348, 0.1298, 0.481, 0.180)),
    ("ArcFace", ("StyleGAN2", 0.825, 0.0029, 0.754, 0.683),
     ("ProjectedGAN", 2.820, 0.0095, 0.725, 0.648)),
]


def _reference_report() -> MetricReport:
    rows, groups = [], []
    for extractor, first, second in _REFERENCE_ROWS:
        for label, fid_v, kid_v, p, r in (first, second):
            rows.append(
                ReportRow(
                    extractor=extractor,
                    source=label,
                    fid=fid_v,
                    kid_mean=kid_v,
                    kid_stddev=0.0,
                    precision=p,
                    recall=r,
                )
            )
        groups.append((len(rows) - 2, len(rows) - 1))
    return MetricReport(rows=rows, comparison_groups=groups)


def test_report_fidelity():
    """Reference-row marking and the x1000 scaled rendering both reproduce."""
    report = _reference_report()
    marks = second_better_markers(report)

    # InceptionV3 pair: FID, KID, and recall favor the second source; not P.
    assert marks.get((1, "fid")) and marks.get((1, "kid_mean"))
    assert marks.get((1, "recall"))
    assert (1, "precision") not in marks
    # CLIP (row 3) and ArcFace (row 7) second rows: never better.
    assert not any(key[0] in (3, 7) for key in marks)
    # DINOv2 second row: only recall improves.
    assert [key for key in marks if key[0] == 5] == [(5, "recall")]

    text = render_report(report, "markdown")
    assert "| InceptionV3 | ProjectedGAN | ***4.520*** | ***0.0009*** " in text
    assert "| CLIP | ProjectedGAN | 4.111 | 0.0087 | 0.605 | 0.349 |" in text
    assert "***0.479***" in text

    scaled = MetricReport(
        rows=[
            ReportRow("InceptionV3", "StyleGAN2", 0.011128, 0.00000352, 0.0, 0.757, 0.443),
            ReportRow("InceptionV3", "ProjectedGAN", 0.011546, 0.00000193, 0.0, 0.711, 0.533),
        ],
        scale_1000=True,
        comparison_groups=[(0, 1)],
    )
    scaled_text = render_report(scaled, "markdown")
    assert "| 11.128 |" in scaled_text
    assert "| 11.546 |" in scaled_text
    assert "***11.546***" not in scaled_text
    assert "FID and KID scaled by 1000." in scaled_text
    _pass("report fidelity (pair marking and x1000 scaling)")
