"""Command-line surface.

Exit statuses: 0 success, 1 internal error, 2 input validation error. Failures
emit one JSON line on stderr with a stable machine-readable ``error`` code.
Worker threads for all metric computations are capped by GENMETRICS_THREADS.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from .errors import GenMetricsError, ValidationError
from .feature_store import (
    DTYPE_FLOAT32,
    FeatureSet,
    normalize,
    read_features,
    write_features,
)
from .kid import KidConfig
from .kid import kid as kid_metric
from .moments import MODE_ELEMENTWISE, MODE_PRODUCT
from .moments import fid as fid_metric
from .pnr import PrConfig, precision_recall
from .report import build_report, render_report
from .synth import GaussianSpec, sample_gaussian

_FID_MODES = click.Choice([MODE_PRODUCT, MODE_ELEMENTWISE])
_FORMATS = click.Choice(["json", "markdown"])


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload))


def _fail(code: str, message: str, status: int) -> None:
    click.echo(json.dumps({"error": code, "message": message}), err=True)
    sys.exit(status)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            _fail(exc.code, str(exc), 2)
        except OSError as exc:
            _fail("io-error", str(exc), 2)
        except GenMetricsError as exc:
            _fail(exc.code, str(exc), 1)
        except Exception as exc:  # pragma: no cover - defensive
            _fail("internal", f"{type(exc).__name__}: {exc}", 1)

    return wrapper


def _load_pair(source, target, apply_normalize):
    src = read_features(source)
    tgt = read_features(target)
    if apply_normalize:
        src = normalize(src)
        tgt = normalize(tgt)
    return src, tgt


@click.group()
def main() -> None:
    """Feature-distribution closeness metrics (FID, KID, precision/recall)."""


@main.command("inspect")
@click.option("--source", required=True, help="Feature file to inspect.")
@_guarded
def inspect_cmd(source: str) -> None:
    """Validate a feature file and dump its header."""
    features = read_features(source)
    _emit(
        {
            "magic": "GMFEAT01",
            "dtype_code": DTYPE_FLOAT32,
            "count": features.count,
            "dim": features.dim,
            "valid": True,
        }
    )


@main.command("normalize")
@click.option("--source", required=True, help="Input feature file.")
@click.option("--out", required=True, help="Output feature file.")
@_guarded
def normalize_cmd(source: str, out: str) -> None:
    """L2-normalize every row of a feature file."""
    features = normalize(read_features(source))
    write_features(features, out)
    _emit({"count": features.count, "dim": features.dim, "out": out})


@main.command("fid")
@click.option("--source", required=True)
@click.option("--target", required=True)
@click.option("--normalize", "apply_normalize", is_flag=True, default=False)
@click.option("--fid-mode", type=_FID_MODES, default=MODE_PRODUCT, show_default=True)
@_guarded
def fid_cmd(source: str, target: str, apply_normalize: bool, fid_mode: str) -> None:
    """Frechet distance between two feature files."""
    src, tgt = _load_pair(source, target, apply_normalize)
    _emit({"fid": fid_metric(src, tgt, fid_mode)})


@main.command("kid")
@click.option("--source", required=True)
@click.option("--target", required=True)
@click.option("--normalize", "apply_normalize", is_flag=True, default=False)
@click.option("--kid-subset-size", type=int, default=None)
@click.option("--kid-subsets", type=int, default=KidConfig.num_subsets, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_guarded
def kid_cmd(
    source: str,
    target: str,
    apply_normalize: bool,
    kid_subset_size: int | None,
    kid_subsets: int,
    seed: int,
) -> None:
    """Kernel distance between two feature files."""
    src, tgt = _load_pair(source, target, apply_normalize)
    cfg = KidConfig(subset_size=kid_subset_size, num_subsets=kid_subsets, seed=seed)
    mean, stddev = kid_metric(src, tgt, cfg)
    _emit({"kid_mean": mean, "kid_stddev": stddev})


@main.command("pr")
@click.option("--source", required=True)
@click.option("--target", required=True)
@click.option("--normalize", "apply_normalize", is_flag=True, default=False)
@click.option("--k", type=int, default=PrConfig.k, show_default=True)
@click.option("--q", type=float, default=PrConfig.q, show_default=True)
@_guarded
def pr_cmd(
    source: str, target: str, apply_normalize: bool, k: int, q: float
) -> None:
    """Manifold precision and recall between two feature files."""
    src, tgt = _load_pair(source, target, apply_normalize)
    precision, recall = precision_recall(src, tgt, PrConfig(k=k, q=q))
    _emit({"precision": precision, "recall": recall})


@main.command("report")
@click.option("--config", "config_path", required=True, help="Report config JSON.")
@click.option("--format", "fmt", type=_FORMATS, default="markdown", show_default=True)
@click.option("--scale-1000", "scale_1000", is_flag=True, default=None)
@_guarded
def report_cmd(config_path: str, fmt: str, scale_1000: bool | None) -> None:
    """Evaluate a report config and render the result table."""
    from pathlib import Path

    path = Path(config_path)
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if scale_1000:
        config["scale_1000"] = True
    report = build_report(config, base_dir=path.parent)
    click.echo(render_report(report, fmt), nl=False)


@main.command("synth")
@click.option("--spec", "spec_path", required=True, help="Gaussian spec JSON.")
@click.option("--out", required=True, help="Output feature file.")
@_guarded
def synth_cmd(spec_path: str, out: str) -> None:
    """Sample a seeded Gaussian population into a feature file."""
    with open(spec_path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    spec = GaussianSpec(
        mean=np.asarray(raw["mean"], dtype=np.float64),
        cov=np.asarray(raw["cov"], dtype=np.float64),
        seed=int(raw.get("seed", 0)),
        count=int(raw["count"]),
    )
    features = sample_gaussian(spec)
    if "label" in raw:
        features = FeatureSet(
            data=features.data, label=str(raw["label"]), normalized=False
        )
    write_features(features, out)
    _emit({"count": features.count, "dim": features.dim, "out": out})


if __name__ == "__main__":
    main()
