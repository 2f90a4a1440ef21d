"""Metric report assembly and rendering.

A report holds one row per (extractor, source) evaluation against a target
plus formatting directives: an optional x1000 scaling of FID/KID for
readability, and comparison groups marking where the second source of a pair
beats the first (lower FID/KID, higher precision/recall; strictly better
only). Markers are always derived from the raw stored values; scaling is
applied at render time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ._parallel import map_ordered
from .errors import ConfigError, DimensionMismatchError
from .feature_store import FeatureSet, normalize, read_features
from .kid import KidConfig, kid
from .moments import MODE_PRODUCT, fid
from .pnr import PrConfig, precision_recall

# Metric column -> (row attribute, True when lower is better)
_METRICS = (
    ("fid", True),
    ("kid_mean", True),
    ("precision", False),
    ("recall", False),
)

_HEADER = "| Extractor | Source | FID ↓ | KID ↓ | P ↑ | R ↑ |"
_RULE = "| --- | --- | --- | --- | --- | --- |"


@dataclass(frozen=True)
class ReportRow:
    extractor: str
    source: str
    fid: float
    kid_mean: float
    kid_stddev: float
    precision: float
    recall: float


@dataclass(frozen=True)
class MetricReport:
    rows: list[ReportRow]
    normalized: bool = False
    scale_1000: bool = False
    comparison_groups: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        for first, second in self.comparison_groups:
            for idx in (first, second):
                if not 0 <= idx < len(self.rows):
                    raise ConfigError(
                        f"comparison group references row {idx}, "
                        f"report has {len(self.rows)} rows"
                    )


def second_better_markers(report: MetricReport) -> dict[tuple[int, str], bool]:
    """(row index, metric name) -> True where the pair's second row wins."""
    marks: dict[tuple[int, str], bool] = {}
    for first, second in report.comparison_groups:
        a, b = report.rows[first], report.rows[second]
        for name, lower_better in _METRICS:
            va, vb = getattr(a, name), getattr(b, name)
            better = vb < va if lower_better else vb > va
            if better:
                marks[(second, name)] = True
    return marks


def run_pair(
    source_path,
    target_path,
    *,
    normalize_features: bool = False,
    fid_mode: str = MODE_PRODUCT,
    kid_config: KidConfig | None = None,
    pr_config: PrConfig | None = None,
    extractor: str = "",
    source_label: str | None = None,
) -> ReportRow:
    """Evaluate one source file against one target file on all three metrics.

    When normalization is requested it is applied to BOTH sets before any
    metric is computed.
    """
    source = read_features(source_path)
    target = read_features(target_path)
    if source.dim != target.dim:
        raise DimensionMismatchError(
            f"{source_path}: dim {source.dim} does not match "
            f"{target_path}: dim {target.dim}"
        )
    if normalize_features:
        source = normalize(source)
        target = normalize(target)
    return _row_from_sets(
        source,
        target,
        fid_mode=fid_mode,
        kid_config=kid_config,
        pr_config=pr_config,
        extractor=extractor,
        source_label=source_label
        if source_label is not None
        else Path(source_path).stem,
    )


def _row_from_sets(
    source: FeatureSet,
    target: FeatureSet,
    *,
    fid_mode: str,
    kid_config: KidConfig | None,
    pr_config: PrConfig | None,
    extractor: str,
    source_label: str,
) -> ReportRow:
    fid_value = fid(source, target, fid_mode)
    kid_mean, kid_stddev = kid(source, target, kid_config)
    precision, recall = precision_recall(source, target, pr_config)
    return ReportRow(
        extractor=extractor,
        source=source_label,
        fid=fid_value,
        kid_mean=kid_mean,
        kid_stddev=kid_stddev,
        precision=precision,
        recall=recall,
    )


def build_report(config: dict, base_dir=None) -> MetricReport:
    """Evaluate every (extractor, source) entry of a report configuration.

    The configuration lists a target file, per-extractor groups of source
    files, and the flag set; groups of exactly two sources become comparison
    pairs. Relative paths resolve against ``base_dir``. Source files within
    the report are evaluated concurrently; row order follows the config.
    """
    base = Path(base_dir) if base_dir is not None else Path(".")
    groups = config.get("groups")
    if not groups:
        raise ConfigError("report config has no groups")
    normalize_features = bool(config.get("normalize", False))
    fid_mode = config.get("fid_mode", MODE_PRODUCT)
    kid_config = _kid_config(config.get("kid", {}))
    pr_config = _pr_config(config.get("pr", {}))

    jobs = []
    for group in groups:
        extractor = group.get("extractor", "")
        target = group.get("target", config.get("target"))
        if target is None:
            raise ConfigError(f"group {extractor!r} has no target file")
        sources = group.get("sources")
        if not sources:
            raise ConfigError(f"group {extractor!r} has no sources")
        for entry in sources:
            if "path" not in entry:
                raise ConfigError(f"group {extractor!r}: source entry has no path")
            jobs.append((extractor, str(base / target), entry))

    def evaluate(job: tuple[str, str, dict]) -> ReportRow:
        extractor, target_path, entry = job
        return run_pair(
            str(base / entry["path"]),
            target_path,
            normalize_features=normalize_features,
            fid_mode=fid_mode,
            kid_config=kid_config,
            pr_config=pr_config,
            extractor=extractor,
            source_label=entry.get("label"),
        )

    rows = map_ordered(evaluate, jobs)

    pairs: list[tuple[int, int]] = []
    index = 0
    for group in groups:
        width = len(group["sources"])
        if width == 2:
            pairs.append((index, index + 1))
        index += width

    return MetricReport(
        rows=rows,
        normalized=normalize_features,
        scale_1000=bool(config.get("scale_1000", False)),
        comparison_groups=pairs,
    )


def _kid_config(raw: dict) -> KidConfig:
    return KidConfig(
        subset_size=raw.get("subset_size"),
        num_subsets=int(raw.get("num_subsets", KidConfig.num_subsets)),
        seed=int(raw.get("seed", 0)),
    )


def _pr_config(raw: dict) -> PrConfig:
    return PrConfig(k=int(raw.get("k", PrConfig.k)), q=float(raw.get("q", PrConfig.q)))


def render_report(report: MetricReport, format: str = "markdown") -> str:
    """Render a report as a markdown table or a JSON document.

    Markdown applies the x1000 scaling and bold-italic better-source marks;
    JSON always carries the raw unscaled values plus the flags. Both renderings
    are byte-deterministic.
    """
    if format == "json":
        return _render_json(report)
    if format == "markdown":
        return _render_markdown(report)
    raise ConfigError(f"unknown report format {format!r}")


def _render_json(report: MetricReport) -> str:
    doc = {
        "normalized": report.normalized,
        "scale_1000": report.scale_1000,
        "comparison_groups": [list(pair) for pair in report.comparison_groups],
        "rows": [
            {
                "extractor": row.extractor,
                "source": row.source,
                "fid": row.fid,
                "kid_mean": row.kid_mean,
                "kid_stddev": row.kid_stddev,
                "precision": row.precision,
                "recall": row.recall,
            }
            for row in report.rows
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def report_from_json(text: str) -> MetricReport:
    doc = json.loads(text)
    rows = [ReportRow(**row) for row in doc["rows"]]
    return MetricReport(
        rows=rows,
        normalized=doc["normalized"],
        scale_1000=doc["scale_1000"],
        comparison_groups=[tuple(pair) for pair in doc["comparison_groups"]],
    )


def _render_markdown(report: MetricReport) -> str:
    marks = second_better_markers(report)
    scale = 1000.0 if report.scale_1000 else 1.0
    lines = [_HEADER, _RULE]
    for idx, row in enumerate(report.rows):
        cells = [
            row.extractor,
            row.source,
            _cell(idx, "fid", row.fid * scale, 3, marks),
            _cell(idx, "kid_mean", row.kid_mean * scale, 4, marks),
            _cell(idx, "precision", row.precision, 3, marks),
            _cell(idx, "recall", row.recall, 3, marks),
        ]
        lines.append("| " + " | ".join(cells) + " |")
    notes = []
    if report.scale_1000:
        notes.append("FID and KID scaled by 1000.")
    if report.normalized:
        notes.append("Features L2-normalized before evaluation.")
    notes.append("Bold-italic marks a pair's second source where strictly better.")
    lines.append("")
    lines.extend(f"*{note}*" for note in notes)
    return "\n".join(lines) + "\n"


def _cell(
    idx: int, name: str, value: float, digits: int, marks: dict[tuple[int, str], bool]
) -> str:
    text = f"{value:.{digits}f}"
    if marks.get((idx, name)):
        return f"***{text}***"
    return text
