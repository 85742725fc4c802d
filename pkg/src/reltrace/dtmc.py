"""Per-domain transition model: state space, counts, and estimated probabilities.

States are the distinct versions a domain was observed running, indexed in
first-appearance order.  Transition probabilities come from the usual
frequency estimate f_ij / f_i over adjacent sightings.  A state that only
ever appears at the end of a sequence has no outgoing data; its whole row
is zero, so these are generally not stochastic matrices.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .sequences import VersionSequence
from .versions import Version

ROW_SUM_TOLERANCE = 1e-12


@dataclass
class TransitionModel:
    """Sparse transition counts and probabilities for one domain.

    counts and probs are keyed by (from_index, to_index) over the states
    tuple; absent keys are zero.  row_totals[i] is the number of observed
    transitions out of state i.
    """

    states: tuple[Version, ...]
    counts: Mapping[tuple[int, int], int]
    probs: Mapping[tuple[int, int], float]
    row_totals: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.states)

    def count(self, i: int, j: int) -> int:
        return self.counts.get((i, j), 0)

    def prob(self, i: int, j: int) -> float:
        return self.probs.get((i, j), 0.0)

    def counts_matrix(self) -> list[list[int]]:
        n = self.n
        return [[self.count(i, j) for j in range(n)] for i in range(n)]

    def probs_matrix(self) -> list[list[float]]:
        n = self.n
        return [[self.prob(i, j) for j in range(n)] for i in range(n)]

    def to_json_dict(self, domain: str | None = None) -> dict:
        return {
            "domain": domain,
            "states": [str(s) for s in self.states],
            "counts": self.counts_matrix(),
            "probs": self.probs_matrix(),
        }

    def render_text(self) -> str:
        """Aligned matrix with probabilities rounded to two decimals."""
        lines = []
        width = max(len(str(s)) for s in self.states)
        for i, state in enumerate(self.states):
            row = "  ".join(format_probability(self.prob(i, j)) for j in range(self.n))
            lines.append(f"{str(state):>{width}}  [ {row} ]")
        return "\n".join(lines)


def format_probability(p: float) -> str:
    """Two-decimal display form (banker's rounding, like round())."""
    return f"{round(p, 2):.2f}"


def estimate(seq: VersionSequence | Sequence[Version] | Iterable[Version]) -> TransitionModel:
    """Estimate the transition model of one version sequence.

    f_ij counts adjacent pairs (s_i then s_j); p_ij is f_ij / f_i where
    state i has outgoing data and 0 everywhere on rows without it.
    Raises ValueError for sequences shorter than two.
    """
    versions = seq.versions if isinstance(seq, VersionSequence) else tuple(seq)
    if len(versions) < 2:
        raise ValueError("cannot estimate transitions from fewer than two sightings")

    index: dict[Version, int] = {}
    for v in versions:
        index.setdefault(v, len(index))
    states = tuple(index)

    counts = Counter(
        (index[a], index[b]) for a, b in zip(versions, versions[1:]))
    row_totals = [0] * len(states)
    for (i, _), c in counts.items():
        row_totals[i] += c
    probs = {ij: c / row_totals[ij[0]] for ij, c in counts.items()}
    return TransitionModel(states, dict(counts), probs, tuple(row_totals))


def self_loop_complement(model: TransitionModel) -> list[float]:
    """1 - p_ii per state; a zero row contributes 1 - 0 = 1."""
    return [1.0 - model.prob(i, i) for i in range(model.n)]


def write_model_json(model: TransitionModel, path: str | Path,
                     domain: str | None = None) -> None:
    Path(path).write_text(
        json.dumps(model.to_json_dict(domain), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
