"""Dataset context around a single instance: densities, z-scores, summaries.

These artifacts let a user judge how unusual an instance is before reading
its counterfactual: per-bin frequency counts (optionally conditioned on the
ground-truth class), standardized values, and an ordering of features by how
far each value sits from its column average.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import BinGrid, Dataset, FeatureStats, bin_of, bins_of_column
from .model import Correctness, Predictor, correctness_label, predict_class

__all__ = [
    "DensityCondition",
    "DensityHistogram",
    "InstanceSummary",
    "density_histogram",
    "z_scores",
    "sort_features",
    "instance_summary",
    "summarize_values",
]


class DensityCondition(str, Enum):
    ALL = "all"
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class DensityHistogram:
    """Per-feature bin counts and display opacities under one condition.

    ``counts[f]`` sums to the number of rows whose ground-truth target
    matches the condition. Opacities rescale each feature's counts by that
    feature's own maximum, so every column shows a full-opacity bin no
    matter how large the dataset is (all zeros when nothing matches).
    """

    condition: DensityCondition
    counts: np.ndarray  # (F, n_bins) ints
    opacities: np.ndarray  # (F, n_bins) floats in [0, 1]

    def __post_init__(self) -> None:
        self.counts.setflags(write=False)
        self.opacities.setflags(write=False)


@dataclass(frozen=True)
class InstanceSummary:
    """Everything the explanation view needs about one instance."""

    index: int  # row index, or -1 for ad-hoc instances
    values: tuple[float, ...]
    bins: tuple[int, ...]
    z_scores: tuple[float, ...]
    probability: float
    predicted_class: int
    correctness: Correctness
    sorted_order: tuple[int, ...]


def _pseudo_bin(n_bins: int) -> int:
    # Degenerate features have no boundaries; all mass sits where the
    # constant value would land as sigma shrinks to zero.
    return n_bins // 2


def density_histogram(
    dataset: Dataset, grid: BinGrid, condition: DensityCondition
) -> DensityHistogram:
    """Bin counts of the rows whose target matches ``condition``."""
    condition = DensityCondition(condition)
    if condition is DensityCondition.ALL:
        mask = np.ones(dataset.n_rows, dtype=bool)
    elif condition is DensityCondition.POSITIVE:
        mask = dataset.targets == 1
    else:
        mask = dataset.targets == 0

    counts = np.zeros((dataset.n_features, grid.n_bins), dtype=np.int64)
    for f in range(dataset.n_features):
        if grid.degenerate[f]:
            counts[f, _pseudo_bin(grid.n_bins)] = int(mask.sum())
            continue
        bins = bins_of_column(grid, f, dataset.rows[mask, f])
        counts[f] = np.bincount(bins, minlength=grid.n_bins)

    maxima = counts.max(axis=1, keepdims=True)
    opacities = np.divide(
        counts, maxima, out=np.zeros(counts.shape, dtype=float), where=maxima > 0
    )
    return DensityHistogram(condition=condition, counts=counts, opacities=opacities)


def z_scores(instance, stats: list[FeatureStats]) -> np.ndarray:
    """Standardized values (x - mean) / std, zero for constant features."""
    x = np.asarray(instance, dtype=float)
    mu = np.array([s.mean for s in stats])
    sd = np.array([s.std for s in stats])
    safe = np.where(sd > 0, sd, 1.0)
    return np.where(sd > 0, (x - mu) / safe, 0.0)


def sort_features(z) -> tuple[int, ...]:
    """Feature indices ordered by |z| descending, ties by ascending index."""
    z = np.asarray(z, dtype=float)
    return tuple(sorted(range(z.shape[0]), key=lambda i: (-abs(z[i]), i)))


def summarize_values(
    values,
    stats: list[FeatureStats],
    grid: BinGrid,
    model: Predictor,
    truth: int | None = None,
    index: int = -1,
) -> InstanceSummary:
    """Summary for an arbitrary instance vector (ad-hoc unless given a row index)."""
    x = np.asarray(values, dtype=float).reshape(-1)
    if x.shape[0] != grid.n_features:
        raise ValueError(f"instance has {x.shape[0]} values, grid expects {grid.n_features}")
    bins = tuple(
        _pseudo_bin(grid.n_bins) if grid.degenerate[f] else bin_of(grid, f, float(x[f]))
        for f in range(grid.n_features)
    )
    z = z_scores(x, stats)
    p = float(np.asarray(model.predict_proba(x[None, :]), dtype=float)[0])
    return InstanceSummary(
        index=index,
        values=tuple(float(v) for v in x),
        bins=bins,
        z_scores=tuple(float(v) for v in z),
        probability=p,
        predicted_class=predict_class(p),
        correctness=correctness_label(p, truth),
        sorted_order=sort_features(z),
    )


def instance_summary(
    dataset: Dataset,
    stats: list[FeatureStats],
    grid: BinGrid,
    model: Predictor,
    index: int,
) -> InstanceSummary:
    """Summary of dataset row ``index``, labelled against its ground truth."""
    if not 0 <= index < dataset.n_rows:
        raise IndexError(f"row index {index} out of range for {dataset.n_rows} rows")
    return summarize_values(
        dataset.rows[index],
        stats,
        grid,
        model,
        truth=int(dataset.targets[index]),
        index=index,
    )
