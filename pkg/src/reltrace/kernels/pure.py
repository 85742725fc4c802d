"""Pure-Python kernel implementations.

These are the reference semantics for the compiled extension; the two
backends must stay behaviourally identical (the test suite compares them
case by case, including float bit patterns).
"""

from __future__ import annotations

import re

import numpy as np

# Grouped variant of the default extraction pattern; must accept exactly the
# same language as reltrace.versions.DEFAULT_PATTERN.
_DEFAULT_RE = re.compile(r"PHP/([0-9])\.([0-9])\.([0-9]+)")


def scan_default(text: str):
    """Find the first default-pattern version hit in *text*.

    Returns ``(major, minor, maintenance, start, end)`` for the leftmost
    match, or ``None``.  ``start:end`` spans the whole match including the
    ``PHP/`` prefix.
    """
    m = _DEFAULT_RE.search(text)
    if m is None:
        return None
    return (int(m[1]), int(m[2]), int(m[3]), m.start(), m.end())


def corpus_metrics(major, minor, maint, offsets):
    """Per-sequence chain statistics over a packed corpus.

    The k-th sequence occupies ``offsets[k]:offsets[k+1]`` of the three
    parallel component arrays.  Every sequence must have length >= 2.

    Returns four arrays indexed by sequence: distinct-state count,
    downgrade-step count, mean complement of the self-loop probabilities,
    and the number of unordered state pairs with transitions both ways.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    nseq = len(offsets) - 1
    state_counts = np.zeros(nseq, dtype=np.int64)
    downgrades = np.zeros(nseq, dtype=np.int64)
    deltas = np.zeros(nseq, dtype=np.float64)
    comm_pairs = np.zeros(nseq, dtype=np.int64)

    maj = np.asarray(major, dtype=np.int64).tolist()
    mnr = np.asarray(minor, dtype=np.int64).tolist()
    mnt = np.asarray(maint, dtype=np.int64).tolist()

    for k in range(nseq):
        s = int(offsets[k])
        e = int(offsets[k + 1])
        r = e - s
        if r < 2:
            raise ValueError(f"sequence {k} has length {r}, need at least 2")

        index: dict[tuple[int, int, int], int] = {}
        idx = []
        for t in range(s, e):
            key = (maj[t], mnr[t], mnt[t])
            idx.append(index.setdefault(key, len(index)))
        n = len(index)

        f_self = [0] * n
        f_row = [0] * n
        edges = set()
        d = 0
        for t in range(r - 1):
            a = idx[t]
            b = idx[t + 1]
            f_row[a] += 1
            if a == b:
                f_self[a] += 1
            else:
                edges.add((a, b))
            p = s + t
            if (maj[p + 1], mnr[p + 1], mnt[p + 1]) < (maj[p], mnr[p], mnt[p]):
                d += 1

        acc = 0.0
        for i in range(n):
            p_ii = f_self[i] / f_row[i] if f_row[i] > 0 else 0.0
            acc += 1.0 - p_ii

        pairs = 0
        for a, b in edges:
            if a < b and (b, a) in edges:
                pairs += 1

        state_counts[k] = n
        downgrades[k] = d
        deltas[k] = acc / n
        comm_pairs[k] = pairs

    return state_counts, downgrades, deltas, comm_pairs
