"""Weighted speaker-listener label propagation.

Every node starts with its own index as its only community label. Each
iteration shuffles the visit order, then every node in turn listens: each
neighbor speaks one label sampled proportionally to its own memory, the
listener sums the edge weights offered per label and keeps the label with
the largest accumulated weight (ties drawn uniformly). Updates are
asynchronous, so a memory grown earlier in an iteration is already visible
to later listeners. After T iterations every memory holds exactly T+1
label occurrences.

Randomness comes from a single numpy PCG64 generator seeded per run, which
is stable across platforms; one run consumes one stream, and concurrent
runs must use separate generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .graph import SpatialGraph, neighbor_arrays

NEIGHBOR_MODES = ("symmetrized", "in-edges", "out-edges")


@dataclass(frozen=True)
class PropagationConfig:
    iterations: int = 100
    seed: int = 0
    neighbor_mode: str = "symmetrized"

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InputError(f"iterations must be >= 1, got {self.iterations}")
        if self.neighbor_mode not in NEIGHBOR_MODES:
            raise InputError(f"neighbor_mode must be one of {NEIGHBOR_MODES}")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class NodeMemory:
    """Multiset of labels a node has accumulated, as label -> count."""

    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class PropagationState:
    """Dense per-node label counts: counts[i, l] is how often node i holds label l."""

    counts: np.ndarray  # (n, n) int64
    totals: np.ndarray  # (n,) int64
    rng: np.random.Generator

    @property
    def n_nodes(self) -> int:
        return int(self.counts.shape[0])

    def memory(self, i: int) -> NodeMemory:
        row = self.counts[i]
        labels = np.flatnonzero(row)
        return NodeMemory(counts={int(l): int(row[l]) for l in labels})

    @property
    def memories(self) -> list[NodeMemory]:
        return [self.memory(i) for i in range(self.n_nodes)]


def init_memories(graph: SpatialGraph, seed: int = 0) -> PropagationState:
    """Stage 1: node i's memory is {i: 1}."""
    n = graph.n_nodes
    if n == 0:
        raise InputError("cannot initialize memories on an empty graph")
    counts = np.eye(n, dtype=np.int64)
    totals = np.ones(n, dtype=np.int64)
    return PropagationState(counts=counts, totals=totals, rng=np.random.default_rng(seed))


def speaker_rule(memory: NodeMemory, rng: np.random.Generator) -> int:
    """Sample a label with probability count/total (classic SLPA speaker)."""
    if not memory.counts:
        raise ValueError("speaker_rule requires a non-empty memory")
    labels = sorted(memory.counts)
    cum = np.cumsum([memory.counts[l] for l in labels])
    u = rng.random() * cum[-1]
    return labels[int(np.searchsorted(cum, u, side="right"))]


def listener_rule(offers: Sequence[tuple[int, float]], rng: np.random.Generator) -> int:
    """Keep the label with the largest accumulated edge weight.

    Offers are (label, weight) pairs, one per speaking neighbor; weights
    for repeated labels add up. Exact ties are broken uniformly at random.
    """
    if not offers:
        raise ValueError("listener_rule requires at least one offer")
    sums: dict[int, float] = {}
    for label, w in offers:
        sums[label] = sums.get(label, 0.0) + w
    best = max(sums.values())
    winners = sorted(l for l, s in sums.items() if s == best)
    if len(winners) == 1:
        return winners[0]
    return winners[int(rng.integers(len(winners)))]


def _sample_rows(counts: np.ndarray, totals: np.ndarray, u: np.ndarray) -> np.ndarray:
    # Row-wise proportional sampling: first column index with cumsum > u.
    cum = np.cumsum(counts, axis=1)
    return (cum <= u[:, None]).sum(axis=1)


def run_propagation(graph: SpatialGraph, config: PropagationConfig) -> PropagationState:
    """Stage 2: run T shuffled asynchronous listening sweeps.

    Isolated nodes receive a self-offer of weight 1 so their totals keep
    pace and they stay singleton communities. The accumulated-weight argmax
    is invariant under uniform scaling of all edge weights, so rescaling
    the graph leaves the decision sequence (and the final state) unchanged
    for a fixed seed.
    """
    if graph.n_nodes == 0:
        raise InputError("cannot propagate on an empty graph")
    state = init_memories(graph, seed=config.seed)
    rng = state.rng
    n = graph.n_nodes
    nbrs, wts = neighbor_arrays(graph, config.neighbor_mode)
    counts = state.counts
    totals = state.totals
    for _ in range(config.iterations):
        order = rng.permutation(n)
        for i in order:
            nb = nbrs[i]
            if nb.size == 0:
                u = rng.random(1) * totals[i : i + 1]
                winner = int(_sample_rows(counts[i : i + 1], totals[i : i + 1], u)[0])
            else:
                u = rng.random(nb.size) * totals[nb]
                labels = _sample_rows(counts[nb], totals[nb], u)
                sums = np.bincount(labels, weights=wts[i], minlength=n)
                best = sums.max()
                winners = np.flatnonzero(sums == best)
                if winners.size == 1:
                    winner = int(winners[0])
                else:
                    winner = int(winners[rng.integers(winners.size)])
            counts[i, winner] += 1
            totals[i] += 1
    return state


def dump_memories(state: PropagationState, graph: SpatialGraph, path) -> None:
    """Write the post-propagation memories as CSV node_id,label,count."""
    import csv
    from pathlib import Path

    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "label", "count"])
        for i in range(state.n_nodes):
            row = state.counts[i]
            for l in np.flatnonzero(row):
                writer.writerow([graph.zone_ids[i], graph.zone_ids[int(l)], int(row[l])])
