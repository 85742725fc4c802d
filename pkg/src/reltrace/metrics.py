"""Adoption metrics: prevalence, downgrading, communicating pairs, uniformity.

Per-domain metrics from one sequence and its transition model:

* delta: mean complement of the self-loop probabilities; 0 means the
  deployment never changed, values near 1 mean frequent adoption.
* d and phi: downgrade steps among the r - 1 adjacent pairs, and their
  share d / (r - 1).
* gamma: unordered state pairs with transitions both ways (evidence of a
  downgrade cycle), scaled by r - 1.  Self loops are not pairs.

Corpus-level reports: uniqueness of whole sequences and version frequency
tables.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .dtmc import TransitionModel, estimate, self_loop_complement
from .ingest import Observation
from .sequences import VersionSequence
from .versions import DowngradeKind, Version, classify_transition


@dataclass(frozen=True)
class DomainMetrics:
    domain: str
    r: int
    state_count: int
    delta: float
    downgrades: int
    phi: float
    gamma: float


@dataclass(frozen=True)
class SubsetUniformity:
    domain_count: int
    unique_sequences: int
    share_of_m: float


@dataclass(frozen=True)
class UniformityReport:
    """Unique-sequence counts, split by single-state vs multi-state domains.

    Shares are percentages of the whole corpus size m, not of the subset.
    """

    single_state: SubsetUniformity
    multi_state: SubsetUniformity


@dataclass(frozen=True)
class FrequencyReport:
    """Version occurrence counts and the final-state major-branch split.

    version_counts counts every observation (not one vote per domain);
    final_major_share is the percentage of domains whose last sighted
    version belongs to each major branch.
    """

    version_counts: dict[Version, int]
    final_major_share: dict[int, float]


def prevalence(model: TransitionModel) -> float:
    """Mean complement of the self-loop probabilities, in [0, 1]."""
    return sum(self_loop_complement(model)) / model.n


def downgrade_rate(seq: VersionSequence) -> tuple[int, float]:
    """Number of downgrade steps d and their share phi = d / (r - 1)."""
    versions = seq.versions
    d = sum(
        1 for a, b in zip(versions, versions[1:])
        if classify_transition(a, b) is not DowngradeKind.NONE)
    return d, d / (seq.r - 1)


def communicating_rate(model: TransitionModel, r: int) -> tuple[int, float]:
    """Unordered state pairs {i, j}, i != j, with transitions both ways.

    Returns the pair count and gamma = pairs / (r - 1), where r is the
    length of the sequence the model was estimated from.
    """
    pairs = 0
    for i in range(model.n):
        for j in range(i + 1, model.n):
            if model.count(i, j) > 0 and model.count(j, i) > 0:
                pairs += 1
    return pairs, pairs / (r - 1)


def domain_metrics(seq: VersionSequence) -> DomainMetrics:
    """All per-domain metrics for one sequence (reference path)."""
    model = estimate(seq)
    delta = prevalence(model)
    d, phi = downgrade_rate(seq)
    pairs, gamma = communicating_rate(model, seq.r)
    return DomainMetrics(seq.domain, seq.r, model.n, delta, d, phi, gamma)


def corpus_metrics(sequences: Sequence[VersionSequence]) -> list[DomainMetrics]:
    """Per-domain metrics for a whole corpus via the kernel backend.

    Behaves exactly like mapping domain_metrics over the corpus; the bulk
    path exists because corpora run to hundreds of thousands of domains.
    Falls back to the reference path when a version component does not fit
    the packed 64-bit encoding.
    """
    if not sequences:
        return []
    try:
        major, minor, maint, offsets = _encode(sequences)
    except OverflowError:
        return [domain_metrics(seq) for seq in sequences]
    state_counts, downs, deltas, pairs = kernels.corpus_metrics(
        major, minor, maint, offsets)
    out = []
    for k, seq in enumerate(sequences):
        span = seq.r - 1
        out.append(DomainMetrics(
            domain=seq.domain,
            r=seq.r,
            state_count=int(state_counts[k]),
            delta=float(deltas[k]),
            downgrades=int(downs[k]),
            phi=int(downs[k]) / span,
            gamma=int(pairs[k]) / span,
        ))
    return out


def _encode(sequences: Sequence[VersionSequence]):
    total = sum(seq.r for seq in sequences)
    major = np.empty(total, dtype=np.int64)
    minor = np.empty(total, dtype=np.int64)
    maint = np.empty(total, dtype=np.int64)
    offsets = np.empty(len(sequences) + 1, dtype=np.int64)
    pos = 0
    offsets[0] = 0
    for k, seq in enumerate(sequences):
        for v in seq.versions:
            major[pos] = v.major
            minor[pos] = v.minor
            maint[pos] = v.maintenance
            pos += 1
        offsets[k + 1] = pos
    return major, minor, maint, offsets


def uniformity(sequences: Sequence[VersionSequence]) -> UniformityReport:
    """Unique version sequences per subset, as counts and shares of m.

    Sequences are compared element-wise including repetitions, so
    [a, a, b] and [a, b] are different.
    """
    if not sequences:
        raise ValueError("uniformity needs a non-empty corpus")
    m = len(sequences)
    single: set[tuple] = set()
    multi: set[tuple] = set()
    single_domains = 0
    multi_domains = 0
    for seq in sequences:
        fingerprint = tuple(v.key for v in seq.versions)
        if seq.state_count == 1:
            single.add(fingerprint)
            single_domains += 1
        else:
            multi.add(fingerprint)
            multi_domains += 1
    return UniformityReport(
        single_state=SubsetUniformity(single_domains, len(single), 100.0 * len(single) / m),
        multi_state=SubsetUniformity(multi_domains, len(multi), 100.0 * len(multi) / m),
    )


def frequencies(observations: Iterable[Observation],
                sequences: Sequence[VersionSequence]) -> FrequencyReport:
    """Version occurrence counts plus the final-state major-branch shares."""
    counter = Counter(obs.version for obs in observations)
    version_counts = dict(sorted(counter.items()))
    final_majors = Counter(seq.versions[-1].major for seq in sequences)
    m = len(sequences)
    final_major_share = {
        branch: 100.0 * count / m
        for branch, count in sorted(final_majors.items())
    }
    return FrequencyReport(version_counts, final_major_share)


def write_metrics_csv(metrics: Iterable[DomainMetrics], path: str | Path) -> None:
    """Per-domain table: domain,r,state_count,delta,d,phi,gamma (6 decimals)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["domain", "r", "state_count", "delta", "d", "phi", "gamma"])
        for row in metrics:
            writer.writerow([
                row.domain, row.r, row.state_count,
                f"{row.delta:.6f}", row.downgrades,
                f"{row.phi:.6f}", f"{row.gamma:.6f}",
            ])
