"""Label-memory filtering: per-node one-class SVM, and the manual threshold rule.

After propagation each node holds a multiset of labels. The automated
filter encodes that multiset as scalar features (the k-th most frequent
label becomes `count` copies of k * spacing), fits a one-class SVM per
node, and keeps the labels whose feature is an inlier. With the spacing
and gamma of the default config the RBF kernel is effectively
block-diagonal, which turns the SVM into a data-driven count threshold
(the capped water level) instead of a hand-picked probability cutoff r.

The classic manual rule, keeping labels with probability >= r, is provided
as `threshold_filter` for baseline comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .ocsvm import OcsvmModel, decision_batch, train_ocsvm
from .propagation import NodeMemory, PropagationState

BLOCK_KERNEL_BOUND = 1e-6


@dataclass(frozen=True)
class HistEntry:
    label: int
    count: int
    probability: float


@dataclass(frozen=True)
class LabelHistogram:
    """Distinct labels of one memory, sorted by descending count then ascending label."""

    entries: tuple[HistEntry, ...]
    total: int


@dataclass(frozen=True)
class FilterConfig:
    """One-class SVM filter parameters.

    With numeric gamma the pair (gamma, label_spacing) must satisfy
    exp(-gamma * spacing^2) <= 1e-6 so distinct labels do not interact
    through the kernel; the constructor enforces this. gamma="scale"
    (reciprocal of feature variance, floored at 1e-12) is accepted for
    experimentation but gives no block-diagonality guarantee.
    """

    nu: float = 0.8
    gamma: float | str = 0.5
    label_spacing: float = 10.0

    def __post_init__(self) -> None:
        if not 0.0 < self.nu <= 1.0:
            raise InputError(f"nu must be in (0, 1], got {self.nu}")
        if self.label_spacing <= 0.0:
            raise InputError(f"label_spacing must be positive, got {self.label_spacing}")
        if self.gamma != "scale":
            try:
                g = float(self.gamma)
            except (TypeError, ValueError):
                raise InputError(f"gamma must be positive or 'scale', got {self.gamma!r}") from None
            if g <= 0.0:
                raise InputError(f"gamma must be positive, got {self.gamma}")
            if math.exp(-g * self.label_spacing**2) > BLOCK_KERNEL_BOUND:
                raise InputError(
                    "gamma and label_spacing leave the kernel non-block-diagonal: "
                    f"exp(-gamma*spacing^2) = {math.exp(-g * self.label_spacing**2):.3g} > {BLOCK_KERNEL_BOUND}"
                )


@dataclass(frozen=True)
class ThresholdConfig:
    """Manual filter: keep labels with memory probability >= r (inclusive)."""

    r: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise InputError(f"threshold r must be in [0, 1], got {self.r}")


FilterSpec = FilterConfig | ThresholdConfig


def histogram(memory: NodeMemory) -> LabelHistogram:
    if not memory.counts:
        raise ValueError("histogram requires a non-empty memory")
    total = memory.total
    entries = tuple(
        HistEntry(label=l, count=c, probability=c / total)
        for l, c in sorted(memory.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    )
    return LabelHistogram(entries=entries, total=total)


def histogram_from_row(row: np.ndarray) -> LabelHistogram:
    """Histogram straight from a propagation count-matrix row."""
    labels = np.flatnonzero(row)
    if labels.size == 0:
        raise ValueError("histogram requires a non-empty memory")
    counts = row[labels]
    order = np.lexsort((labels, -counts))
    total = int(counts.sum())
    entries = tuple(
        HistEntry(label=int(labels[k]), count=int(counts[k]), probability=int(counts[k]) / total)
        for k in order
    )
    return LabelHistogram(entries=entries, total=total)


def encode_samples(hist: LabelHistogram, spacing: float) -> np.ndarray:
    """The k-th distinct label contributes count copies of k * spacing."""
    if spacing <= 0.0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    reps = [e.count for e in hist.entries]
    positions = np.arange(len(reps), dtype=np.float64) * spacing
    return np.repeat(positions, reps)


def filter_node_labels(hist: LabelHistogram, cfg: FilterConfig) -> set[int]:
    """Labels retained by a per-node one-class SVM; never empty.

    A single-label histogram is kept without training. If the model were
    to reject every label, the highest-count label survives (lowest label
    value on ties), so every node stays in the cover.
    """
    if len(hist.entries) == 1:
        return {hist.entries[0].label}
    samples = encode_samples(hist, cfg.label_spacing)
    model = train_ocsvm(samples, nu=cfg.nu, gamma=cfg.gamma)
    positions = np.arange(len(hist.entries), dtype=np.float64) * cfg.label_spacing
    scores = decision_batch(model, positions)
    retained = {e.label for e, s in zip(hist.entries, scores) if s >= 0.0}
    if not retained:
        return {hist.entries[0].label}
    return retained


def threshold_filter(hist: LabelHistogram, r: float) -> set[int]:
    """Labels with probability >= r; falls back to the dominant label."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"threshold r must be in [0, 1], got {r}")
    retained = {e.label for e in hist.entries if e.probability >= r}
    if not retained:
        return {hist.entries[0].label}
    return retained


def filter_state(state: PropagationState, spec: FilterSpec) -> list[set[int]]:
    """Apply the configured filter to every node's memory."""
    retained: list[set[int]] = []
    for i in range(state.n_nodes):
        hist = histogram_from_row(state.counts[i])
        if isinstance(spec, ThresholdConfig):
            retained.append(threshold_filter(hist, spec.r))
        else:
            retained.append(filter_node_labels(hist, spec))
    return retained
