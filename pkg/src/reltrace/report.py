"""End-to-end analysis: manifest in, corpus report out.

The report aggregates the corpus summary, uniqueness and frequency tables,
and fixed-width histograms of the three per-domain metrics.  Reports are
deterministic: the same manifest and options produce identical bytes
regardless of the thread count.  Set SOURCE_DATE_EPOCH to pin the
timestamp for fully reproducible output.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .ingest import load_manifest, ingest_all
from .metrics import (
    FrequencyReport,
    SubsetUniformity,
    UniformityReport,
    corpus_metrics,
    frequencies,
    uniformity,
    write_metrics_csv,
)
from .sequences import CorpusSummary, pool, summarize
from .versions import DEFAULT_PATTERN, Version


class PreconditionError(ValueError):
    """The request cannot be attempted (usage-level failure, exit code 2)."""


class AnalysisError(RuntimeError):
    """The run started but the data cannot support an analysis (exit code 1)."""


@dataclass(frozen=True)
class HistogramBin:
    lower: float
    upper: float
    count: int


def histogram(values: Sequence[float], bins: int) -> list[HistogramBin]:
    """Equal-width bins over [0, 1]; the value 1.0 lands in the last bin.

    Counts always sum to len(values); out-of-range values are clamped to
    the boundary bins.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts = [0] * bins
    for v in values:
        idx = int(v * bins)
        if idx >= bins:
            idx = bins - 1
        elif idx < 0:
            idx = 0
        counts[idx] += 1
    return [
        HistogramBin(i / bins, (i + 1) / bins, counts[i])
        for i in range(bins)
    ]


@dataclass(frozen=True)
class RunMetadata:
    pattern: str
    case_sensitive: bool
    manifest_name: str
    manifest_sha256: str
    snapshot_count: int
    snapshots_used: int
    skipped_snapshots: tuple[str, ...]
    generated_at: str
    bins: int


@dataclass(frozen=True)
class AnalysisReport:
    metadata: RunMetadata
    corpus: CorpusSummary
    uniformity: UniformityReport
    frequencies: FrequencyReport
    histograms: dict[str, tuple[HistogramBin, ...]]
    top_versions: tuple[tuple[str, int], ...]


@dataclass
class AnalysisOptions:
    pattern: str = DEFAULT_PATTERN
    case_sensitive: bool = True
    bins: int = 20
    threads: int = 1
    top_n: int = 10
    per_domain_csv: str | Path | None = None


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    seconds = int(epoch) if epoch else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(seconds))


def run_analysis(manifest_path: str | Path,
                 options: AnalysisOptions | None = None) -> AnalysisReport:
    """Run the whole pipeline for one manifest.

    Raises PreconditionError when the manifest lists fewer than two
    snapshots, and AnalysisError when too little usable data remains
    (all-but-one snapshots empty, or no domain present twice).  Empty
    snapshots are skipped and recorded in the metadata.
    """
    options = options or AnalysisOptions()
    manifest_path = Path(manifest_path)
    descriptors = load_manifest(manifest_path)
    if len(descriptors) < 2:
        raise PreconditionError(
            f"{manifest_path}: need at least two snapshots to observe state changes, "
            f"got {len(descriptors)}")

    observations, _stats, skipped = ingest_all(
        descriptors, options.pattern, options.case_sensitive,
        threads=options.threads, skip_empty=True)
    if len(descriptors) - len(skipped) < 2:
        raise AnalysisError(
            f"{manifest_path}: fewer than two non-empty snapshots remain")

    sequences = pool(observations, snapshot_count=len(descriptors))
    if not sequences:
        raise AnalysisError("no domain is present in at least two snapshots")

    per_domain = corpus_metrics(sequences)
    if options.per_domain_csv:
        write_metrics_csv(per_domain, options.per_domain_csv)

    freq = frequencies(observations, sequences)
    top = sorted(freq.version_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    top_versions = tuple(
        (str(version), count) for version, count in top[:options.top_n])

    metadata = RunMetadata(
        pattern=options.pattern,
        case_sensitive=options.case_sensitive,
        manifest_name=manifest_path.name,
        manifest_sha256=hashlib.sha256(manifest_path.read_bytes()).hexdigest(),
        snapshot_count=len(descriptors),
        snapshots_used=len(descriptors) - len(skipped),
        skipped_snapshots=tuple(d.label for d in skipped),
        generated_at=_timestamp(),
        bins=options.bins,
    )
    return AnalysisReport(
        metadata=metadata,
        corpus=summarize(sequences),
        uniformity=uniformity(sequences),
        frequencies=freq,
        histograms={
            "delta": tuple(histogram([m.delta for m in per_domain], options.bins)),
            "phi": tuple(histogram([m.phi for m in per_domain], options.bins)),
            "gamma": tuple(histogram([m.gamma for m in per_domain], options.bins)),
        },
        top_versions=top_versions,
    )


def report_to_json_dict(report: AnalysisReport) -> dict:
    md = report.metadata
    return {
        "metadata": {
            "pattern": md.pattern,
            "case_sensitive": md.case_sensitive,
            "manifest_name": md.manifest_name,
            "manifest_sha256": md.manifest_sha256,
            "snapshot_count": md.snapshot_count,
            "snapshots_used": md.snapshots_used,
            "skipped_snapshots": list(md.skipped_snapshots),
            "generated_at": md.generated_at,
            "bins": md.bins,
        },
        "corpus": {
            "domains": report.corpus.domain_count,
            "mean_length": report.corpus.mean_length,
            "std_length": report.corpus.std_length,
            "mean_state_count": report.corpus.mean_state_count,
            "std_state_count": report.corpus.std_state_count,
        },
        "uniformity": {
            "single_state": _subset_dict(report.uniformity.single_state),
            "multi_state": _subset_dict(report.uniformity.multi_state),
        },
        "frequencies": {
            "version_counts": {
                str(v): c for v, c in report.frequencies.version_counts.items()},
            "final_major_share": {
                str(b): s for b, s in report.frequencies.final_major_share.items()},
        },
        "histograms": {
            name: [[b.lower, b.upper, b.count] for b in hist]
            for name, hist in report.histograms.items()
        },
        "top_versions": [[v, c] for v, c in report.top_versions],
    }


def _subset_dict(subset: SubsetUniformity) -> dict:
    return {
        "domains": subset.domain_count,
        "unique_sequences": subset.unique_sequences,
        "share_of_m": subset.share_of_m,
    }


def report_from_json_dict(data: dict) -> AnalysisReport:
    md = data["metadata"]
    corpus = data["corpus"]
    uni = data["uniformity"]
    freq = data["frequencies"]
    return AnalysisReport(
        metadata=RunMetadata(
            pattern=md["pattern"],
            case_sensitive=md["case_sensitive"],
            manifest_name=md["manifest_name"],
            manifest_sha256=md["manifest_sha256"],
            snapshot_count=md["snapshot_count"],
            snapshots_used=md["snapshots_used"],
            skipped_snapshots=tuple(md["skipped_snapshots"]),
            generated_at=md["generated_at"],
            bins=md["bins"],
        ),
        corpus=CorpusSummary(
            domain_count=corpus["domains"],
            mean_length=corpus["mean_length"],
            std_length=corpus["std_length"],
            mean_state_count=corpus["mean_state_count"],
            std_state_count=corpus["std_state_count"],
        ),
        uniformity=UniformityReport(
            single_state=_subset_from(uni["single_state"]),
            multi_state=_subset_from(uni["multi_state"]),
        ),
        frequencies=FrequencyReport(
            version_counts={
                Version.from_string(v): c
                for v, c in freq["version_counts"].items()},
            final_major_share={
                int(b): s for b, s in freq["final_major_share"].items()},
        ),
        histograms={
            name: tuple(HistogramBin(lower, upper, count)
                        for lower, upper, count in rows)
            for name, rows in data["histograms"].items()
        },
        top_versions=tuple((v, c) for v, c in data["top_versions"]),
    )


def _subset_from(data: dict) -> SubsetUniformity:
    return SubsetUniformity(
        domain_count=data["domains"],
        unique_sequences=data["unique_sequences"],
        share_of_m=data["share_of_m"],
    )


def report_to_json(report: AnalysisReport) -> str:
    return json.dumps(report_to_json_dict(report), indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> AnalysisReport:
    return report_from_json_dict(json.loads(text))


def render_text(report: AnalysisReport) -> str:
    """Aligned human-readable summary of one report."""
    md = report.metadata
    c = report.corpus
    u = report.uniformity
    lines = [
        "release adoption report",
        "=======================",
        f"manifest          {md.manifest_name}  (sha256 {md.manifest_sha256[:12]})",
        f"pattern           {md.pattern}",
        f"snapshots         {md.snapshots_used} used / {md.snapshot_count} listed"
        + (f"  (skipped: {', '.join(md.skipped_snapshots)})" if md.skipped_snapshots else ""),
        f"generated         {md.generated_at}",
        "",
        f"domains (m)       {c.domain_count}",
        f"sequence length   mean {c.mean_length:.2f}  std {c.std_length:.2f}",
        f"state-space size  mean {c.mean_state_count:.2f}  std {c.std_state_count:.2f}",
        "",
        "unique sequences",
        f"  single state    {u.single_state.unique_sequences}"
        f"  ({u.single_state.share_of_m:.2f}% of m, {u.single_state.domain_count} domains)",
        f"  multi state     {u.multi_state.unique_sequences}"
        f"  ({u.multi_state.share_of_m:.2f}% of m, {u.multi_state.domain_count} domains)",
        "",
        "final-state major branches",
    ]
    for branch, share in report.frequencies.final_major_share.items():
        lines.append(f"  major {branch:<4}      {share:6.2f}% of domains")
    lines.append("")
    lines.append("top versions (by observation count)")
    for version, count in report.top_versions:
        lines.append(f"  {version:<12}    {count}")
    for name in ("delta", "phi", "gamma"):
        lines.append("")
        lines.append(f"{name} histogram")
        hist = report.histograms[name]
        peak = max((b.count for b in hist), default=0)
        for b in hist:
            bar = "#" * (round(40 * b.count / peak) if peak else 0)
            closing = "]" if b.upper >= 1 else ")"
            lines.append(f"  [{b.lower:.2f}, {b.upper:.2f}{closing} "
                         f"{b.count:>8}  {bar}")
    lines.append("")
    return "\n".join(lines)
