"""Pool per-snapshot observations into ordered per-domain version sequences.

Domains seen in fewer than two snapshots are dropped: with a single
sighting no state change is observable.  Gaps are skipped without
placeholders, so a sequence is simply the sightings that exist, in
snapshot order.
"""

from __future__ import annotations

import csv
import statistics
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .ingest import Observation
from .versions import Version


class EmptyCorpusError(ValueError):
    """No sequences survived pooling."""


@dataclass(frozen=True)
class VersionSequence:
    """A domain's versions across snapshots, in chronological order."""

    domain: str
    versions: tuple[Version, ...]
    snapshot_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.versions) != len(self.snapshot_indices):
            raise ValueError("versions and snapshot_indices must be parallel")
        if len(self.versions) < 2:
            raise ValueError("a sequence needs at least two sightings")
        if any(b <= a for a, b in zip(self.snapshot_indices, self.snapshot_indices[1:])):
            raise ValueError("snapshot_indices must be strictly increasing")

    @property
    def r(self) -> int:
        return len(self.versions)

    @property
    def state_count(self) -> int:
        return len(set(self.versions))


@dataclass(frozen=True)
class CorpusSummary:
    """Corpus-level sequence statistics (population standard deviations)."""

    domain_count: int
    mean_length: float
    std_length: float
    mean_state_count: float
    std_state_count: float


def pool(observations: Iterable[Observation],
         snapshot_count: int | None = None) -> list[VersionSequence]:
    """Group observations by domain into sequences, sorted by domain.

    Input order is irrelevant.  Domains with a single sighting are
    dropped.  When snapshot_count is given, indices are validated against
    it.  Two observations for the same (snapshot, domain) violate the
    ingest dedup contract and raise ValueError.
    """
    by_domain: dict[str, list[Observation]] = defaultdict(list)
    for obs in observations:
        if snapshot_count is not None and not 0 <= obs.snapshot_index < snapshot_count:
            raise ValueError(
                f"snapshot index {obs.snapshot_index} outside 0..{snapshot_count - 1}")
        by_domain[obs.domain].append(obs)

    sequences = []
    for domain in sorted(by_domain):
        sightings = sorted(by_domain[domain], key=lambda o: o.snapshot_index)
        if len(sightings) < 2:
            continue
        sequences.append(VersionSequence(
            domain,
            tuple(o.version for o in sightings),
            tuple(o.snapshot_index for o in sightings),
        ))
    return sequences


def summarize(sequences: Sequence[VersionSequence]) -> CorpusSummary:
    """Mean and population standard deviation of sequence length and state-space size."""
    if not sequences:
        raise EmptyCorpusError("cannot summarize an empty corpus")
    lengths = [seq.r for seq in sequences]
    states = [seq.state_count for seq in sequences]
    return CorpusSummary(
        domain_count=len(sequences),
        mean_length=statistics.fmean(lengths),
        std_length=statistics.pstdev(lengths),
        mean_state_count=statistics.fmean(states),
        std_state_count=statistics.pstdev(states),
    )


def write_sequences_csv(sequences: Iterable[VersionSequence], path: str | Path) -> None:
    """Write the sequence export: domain,snapshot_index,version, sorted."""
    rows = []
    for seq in sequences:
        for idx, version in zip(seq.snapshot_indices, seq.versions):
            rows.append((seq.domain, idx, str(version)))
    rows.sort(key=lambda row: (row[0], row[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["domain", "snapshot_index", "version"])
        writer.writerows(rows)


def read_sequences_csv(path: str | Path) -> list[VersionSequence]:
    """Read a sequence export back, re-applying the two-sighting filter."""
    observations = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            observations.append(Observation(
                int(row["snapshot_index"]), row["domain"],
                Version.from_string(row["version"])))
    return pool(observations)
