"""Stream snapshot CSV files and emit one version observation per domain.

A snapshot is one crawl epoch: a CSV of URLs and response-header text.
Ingestion identifies each domain at most once per snapshot, keeping the
first row whose header text matches the extraction pattern.  Rows for a
domain that already matched are skipped without parsing, mirroring how
large crawl archives are usually deduplicated.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from urllib.parse import urlsplit

from .versions import DEFAULT_PATTERN, Version, compile_pattern

# Very wide CSV fields occur in raw header blobs.
csv.field_size_limit(16 * 1024 * 1024)


class ManifestError(ValueError):
    """A snapshot manifest that cannot be used."""


class SnapshotFormatError(ValueError):
    """A snapshot file whose columns do not match its declared layout."""


class EmptySnapshotError(ValueError):
    """A readable snapshot file with zero data rows."""


@dataclass(frozen=True)
class ColumnLayout:
    """Names the URL column and the header-text column of a snapshot.

    ``whole_blob`` distinguishes a column holding the full raw response
    headers from one holding a single extracted header value; both are
    scanned the same way.
    """

    url_column: str
    header_column: str
    whole_blob: bool = False

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ColumnLayout":
        if not isinstance(obj, dict):
            raise ManifestError(f"layout must be an object, got {type(obj).__name__}")
        url_column = obj.get("url_column")
        if not url_column:
            raise ManifestError("layout is missing url_column")
        raw = obj.get("raw_headers_column")
        value = obj.get("header_column")
        if (raw is None) == (value is None):
            raise ManifestError(
                "layout needs exactly one of header_column or raw_headers_column")
        if raw is not None:
            return cls(url_column, raw, whole_blob=True)
        return cls(url_column, value, whole_blob=False)

    def to_json_dict(self) -> dict:
        key = "raw_headers_column" if self.whole_blob else "header_column"
        return {"url_column": self.url_column, key: self.header_column}


@dataclass(frozen=True)
class SnapshotDescriptor:
    """One snapshot in a manifest: chronological index, label, file, layout."""

    index: int
    label: str
    path: Path
    layout: ColumnLayout


@dataclass(frozen=True)
class Observation:
    """One (snapshot, domain, version) sighting."""

    snapshot_index: int
    domain: str
    version: Version


@dataclass
class IngestStats:
    rows_read: int = 0
    rows_malformed: int = 0
    domains_matched: int = 0
    duplicates_skipped: int = 0

    @property
    def rows_nonmatching(self) -> int:
        """Rows parsed for a not-yet-matched domain whose text had no hit."""
        return (self.rows_read - self.rows_malformed
                - self.domains_matched - self.duplicates_skipped)


def extract_domain(url: str) -> str | None:
    """Network location (host[:port], lowercased) of *url*, or None.

    No name resolution is attempted; IP literals come back as-is and the
    scheme is ignored.  Userinfo is stripped.
    """
    try:
        netloc = urlsplit(url.strip()).netloc
    except ValueError:
        return None
    if not netloc:
        return None
    host = netloc.rsplit("@", 1)[-1].lower()
    return host or None


def load_manifest(path: str | Path) -> list[SnapshotDescriptor]:
    """Read a manifest: a JSON array of {label, path, layout} in chronological order.

    Snapshot paths are resolved relative to the manifest's directory.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ManifestError(f"{path}: manifest must be a JSON array")
    descriptors = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise ManifestError(f"{path}: entry {i} is not an object")
        label = entry.get("label")
        snap_path = entry.get("path")
        if not label or not snap_path:
            raise ManifestError(f"{path}: entry {i} needs label and path")
        layout = ColumnLayout.from_json_dict(entry.get("layout"))
        resolved = (path.parent / snap_path).resolve()
        descriptors.append(SnapshotDescriptor(i, str(label), resolved, layout))
    return descriptors


def ingest_snapshot(desc: SnapshotDescriptor,
                    pattern: str = DEFAULT_PATTERN,
                    case_sensitive: bool = True,
                    ) -> tuple[list[Observation], IngestStats]:
    """Scan one snapshot file; one observation per matching domain.

    The first matching row wins for each domain; later rows for an
    already-matched domain are counted under duplicates_skipped.  Rows
    with the wrong column count or an unusable URL are counted under
    rows_malformed and skipped.  Bytes that do not decode as UTF-8 are
    replaced, never fatal.

    Raises EmptySnapshotError for a file with zero data rows, and
    SnapshotFormatError when the layout columns are absent from the
    header row.
    """
    compiled = compile_pattern(pattern, case_sensitive)
    url_col = desc.layout.url_column
    header_col = desc.layout.header_column

    observations: list[Observation] = []
    stats = IngestStats()
    matched: set[str] = set()

    with open(desc.path, newline="", encoding="utf-8", errors="replace") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames
        if fields is not None:
            missing = {url_col, header_col} - set(fields)
            if missing:
                raise SnapshotFormatError(
                    f"{desc.path}: columns {sorted(missing)} not in header row {fields}")
        for row in reader:
            stats.rows_read += 1
            url = row.get(url_col)
            text = row.get(header_col)
            if url is None or text is None or None in row:
                stats.rows_malformed += 1
                continue
            domain = extract_domain(url)
            if domain is None:
                stats.rows_malformed += 1
                continue
            if domain in matched:
                stats.duplicates_skipped += 1
                continue
            version = compiled.search(text)
            if version is None:
                continue
            matched.add(domain)
            observations.append(Observation(desc.index, domain, version))
            stats.domains_matched += 1

    if stats.rows_read == 0:
        raise EmptySnapshotError(f"{desc.path}: no data rows")
    return observations, stats


def ingest_all(descriptors: Sequence[SnapshotDescriptor],
               pattern: str = DEFAULT_PATTERN,
               case_sensitive: bool = True,
               threads: int = 1,
               skip_empty: bool = True,
               ) -> tuple[list[Observation], dict[int, IngestStats], list[SnapshotDescriptor]]:
    """Ingest many snapshots, optionally in parallel.

    Output never depends on the thread count: per-snapshot results are
    reassembled in manifest order.  Empty snapshots are skipped and
    returned separately when skip_empty is set; any other failure
    propagates.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")

    def work(desc: SnapshotDescriptor):
        try:
            return desc, ingest_snapshot(desc, pattern, case_sensitive), None
        except EmptySnapshotError as exc:
            if not skip_empty:
                raise
            return desc, None, exc

    if threads == 1:
        results = [work(d) for d in descriptors]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, descriptors))

    observations: list[Observation] = []
    stats: dict[int, IngestStats] = {}
    skipped: list[SnapshotDescriptor] = []
    for desc, payload, empty in sorted(results, key=lambda item: item[0].index):
        if payload is None:
            skipped.append(desc)
            continue
        obs, snap_stats = payload
        observations.extend(obs)
        stats[desc.index] = snap_stats
    return observations, stats, skipped


def write_observations_csv(observations: Iterable[Observation], path: str | Path) -> None:
    """Write the intermediate export: snapshot_index,domain,version."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snapshot_index", "domain", "version"])
        for obs in observations:
            writer.writerow([obs.snapshot_index, obs.domain, str(obs.version)])


def read_observations_csv(path: str | Path) -> list[Observation]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        out = []
        for row in reader:
            out.append(Observation(int(row["snapshot_index"]), row["domain"],
                                   Version.from_string(row["version"])))
        return out
