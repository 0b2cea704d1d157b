"""CSV ingestion, per-feature Gaussian statistics, and bin discretization.

Every feature column gets a Gaussian fit (population mean and standard
deviation). The bin grid covers the band ``[mean - 2*sigma, mean + 2*sigma]``
with ``n - 2`` equally wide interior bins; the two outer bins are open-ended
and absorb everything beyond the band. All move semantics downstream
(membership, representative values) are defined here so edge behaviour is
decided exactly once.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset",
    "DatasetError",
    "FeatureStats",
    "BinGrid",
    "GridError",
    "load_csv",
    "compute_feature_stats",
    "build_bins",
    "bin_of",
    "bins_of_column",
    "representative_value",
]

# Bad-cell reports are truncated past this many entries to keep errors readable.
_MAX_REPORTED_CELLS = 8


class DatasetError(ValueError):
    """A CSV file or constructed dataset violates the tabular data contract."""


class GridError(ValueError):
    """A bin-grid query is out of range or targets a degenerate feature."""


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric table with binary targets.

    ``rows`` is an (N, F) float matrix, ``targets`` an (N,) vector of 0/1
    labels. Arrays are copied and marked read-only on construction; the
    instance is safe to share across threads.
    """

    feature_names: tuple[str, ...]
    rows: np.ndarray
    targets: np.ndarray
    target_name: str

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=float, copy=True)
        targets = np.array(self.targets, copy=True)
        if rows.ndim != 2:
            raise DatasetError("rows must be a 2-D matrix")
        n, f = rows.shape
        if n < 2:
            raise DatasetError(f"need at least 2 rows, got {n}")
        if f < 1:
            raise DatasetError("need at least 1 feature column")
        if len(self.feature_names) != f:
            raise DatasetError("feature_names length does not match row width")
        names = tuple(str(x) for x in self.feature_names)
        if any(not name for name in names):
            raise DatasetError("feature names must be non-empty")
        if len(set(names)) != len(names):
            raise DatasetError("feature names must be unique")
        if not np.isfinite(rows).all():
            raise DatasetError("feature values must be finite")
        if targets.shape != (n,):
            raise DatasetError("targets length does not match row count")
        if not np.isin(targets, (0, 1)).all():
            raise DatasetError("targets must contain only 0 and 1")
        targets = targets.astype(np.int64)
        rows.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "targets", targets)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class FeatureStats:
    """Gaussian fit plus observed range of one feature column.

    ``std`` is the population standard deviation (divide by N), which is the
    maximum-likelihood Gaussian fit. ``std == 0`` marks a constant column.
    """

    mean: float
    std: float
    observed_min: float
    observed_max: float

    def __post_init__(self) -> None:
        if self.std < 0:
            raise DatasetError("std must be non-negative")
        if self.observed_min > self.observed_max:
            raise DatasetError("observed_min must not exceed observed_max")


@dataclass(frozen=True)
class BinGrid:
    """Per-feature discretization into ``n_bins`` intervals.

    A non-degenerate feature has ``n_bins - 1`` strictly increasing cut
    points: the first at ``mean - 2*sigma``, the last at ``mean + 2*sigma``,
    the rest equally spaced between (interior width ``4*sigma / (n - 2)``).
    Bins are half-open on the right; bin 0 and bin ``n_bins - 1`` extend to
    minus and plus infinity. Degenerate features (``sigma == 0``) carry no
    boundaries and are excluded from moves.
    """

    n_bins: int
    boundaries: tuple[np.ndarray, ...]
    interior_width: tuple[float, ...]
    degenerate: tuple[bool, ...]

    def __post_init__(self) -> None:
        for b in self.boundaries:
            b.setflags(write=False)

    @property
    def n_features(self) -> int:
        return len(self.boundaries)


def load_csv(source, target_column: str | None = None) -> Dataset:
    """Parse a UTF-8 CSV with a header row into a :class:`Dataset`.

    ``source`` may be a binary file object, raw bytes, or a path. The target
    column (default: the last column) must hold only 0/1 values; every other
    column must parse as a finite number. Missing or unparseable cells reject
    the whole file with a report naming each bad row and column; silently
    imputing values would corrupt the explanations built on top.
    """
    if hasattr(source, "read"):
        raw = source.read()
    elif isinstance(source, bytes):
        raw = source
    else:
        raw = Path(source).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError(f"CSV is not valid UTF-8: {exc}") from None

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError("CSV is empty") from None
    header = [h.strip() for h in header]
    if any(not h for h in header):
        raise DatasetError("CSV header contains an empty column name")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DatasetError(f"duplicate header names: {', '.join(dupes)}")

    if target_column is None:
        target_column = header[-1]
    if target_column not in header:
        raise DatasetError(f"target column {target_column!r} not found in header")
    target_idx = header.index(target_column)

    ncols = len(header)
    parsed: list[list[float]] = []
    bad_cells: list[str] = []
    for row_no, cells in enumerate(reader, start=1):
        if not cells:
            continue  # blank line
        if len(cells) != ncols:
            raise DatasetError(
                f"row {row_no} has {len(cells)} cells, expected {ncols}"
            )
        values = []
        for col_idx, cell in enumerate(cells):
            cell = cell.strip()
            if not cell:
                bad_cells.append(f"row {row_no}, column {header[col_idx]!r}: missing value")
                values.append(math.nan)
                continue
            try:
                value = float(cell)
            except ValueError:
                bad_cells.append(
                    f"row {row_no}, column {header[col_idx]!r}: cannot parse {cell!r}"
                )
                values.append(math.nan)
                continue
            if not math.isfinite(value):
                bad_cells.append(
                    f"row {row_no}, column {header[col_idx]!r}: non-finite value {cell!r}"
                )
                value = math.nan
            values.append(value)
        parsed.append(values)

    if bad_cells:
        shown = "; ".join(bad_cells[:_MAX_REPORTED_CELLS])
        extra = len(bad_cells) - _MAX_REPORTED_CELLS
        if extra > 0:
            shown += f"; and {extra} more"
        raise DatasetError(f"unusable cells: {shown}")
    if len(parsed) < 2:
        raise DatasetError(f"need at least 2 data rows, got {len(parsed)}")

    table = np.array(parsed, dtype=float)
    targets = table[:, target_idx]
    if not np.isin(targets, (0.0, 1.0)).all():
        bad = sorted(set(targets) - {0.0, 1.0})
        raise DatasetError(
            f"target column {target_column!r} is not binary; saw values {bad[:5]}"
        )
    features = np.delete(table, target_idx, axis=1)
    names = tuple(h for i, h in enumerate(header) if i != target_idx)
    if not names:
        raise DatasetError("no feature columns remain after removing the target")
    return Dataset(
        feature_names=names,
        rows=features,
        targets=targets.astype(np.int64),
        target_name=target_column,
    )


def compute_feature_stats(dataset: Dataset) -> list[FeatureStats]:
    """Population mean/std and observed range for every feature column."""
    stats = []
    for j in range(dataset.n_features):
        col = dataset.rows[:, j]
        lo = float(col.min())
        hi = float(col.max())
        # Force an exact zero for constant columns; float summation noise
        # must not turn them into movable features.
        std = 0.0 if lo == hi else float(np.std(col))
        stats.append(FeatureStats(mean=float(col.mean()), std=std, observed_min=lo, observed_max=hi))
    return stats


def build_bins(stats: list[FeatureStats], n_bins: int) -> BinGrid:
    """Build the discretization grid for all features at once.

    Cut points follow the closed form ``mean - 2*sigma + k * width`` for
    ``k = 0 .. n_bins - 2`` with ``width = 4*sigma / (n_bins - 2)``.
    """
    if n_bins < 3:
        raise GridError(f"n_bins must be at least 3, got {n_bins}")
    boundaries: list[np.ndarray] = []
    widths: list[float] = []
    degenerate: list[bool] = []
    for s in stats:
        if s.std == 0.0:
            boundaries.append(np.empty(0, dtype=float))
            widths.append(0.0)
            degenerate.append(True)
            continue
        width = 4.0 * s.std / (n_bins - 2)
        cuts = s.mean - 2.0 * s.std + width * np.arange(n_bins - 1, dtype=float)
        if not (np.diff(cuts) > 0).all():
            # sigma too small relative to |mean| for distinct float cut
            # points; no meaningful bins exist at this scale.
            boundaries.append(np.empty(0, dtype=float))
            widths.append(0.0)
            degenerate.append(True)
            continue
        boundaries.append(cuts)
        widths.append(width)
        degenerate.append(False)
    return BinGrid(
        n_bins=n_bins,
        boundaries=tuple(boundaries),
        interior_width=tuple(widths),
        degenerate=tuple(degenerate),
    )


def bin_of(grid: BinGrid, feature: int, value: float) -> int:
    """Bin index of ``value`` for a non-degenerate feature.

    Membership is half-open on the right: bin i covers
    ``[boundary[i-1], boundary[i])``, with the extreme bins open toward
    minus/plus infinity (the top bin is closed upward).
    """
    if grid.degenerate[feature]:
        raise GridError(f"feature {feature} is degenerate (zero variance)")
    if not math.isfinite(value):
        raise GridError(f"cannot bin non-finite value {value!r}")
    return int(np.searchsorted(grid.boundaries[feature], value, side="right"))


def bins_of_column(grid: BinGrid, feature: int, values: np.ndarray) -> np.ndarray:
    """Vectorized :func:`bin_of` over a column of finite values."""
    if grid.degenerate[feature]:
        raise GridError(f"feature {feature} is degenerate (zero variance)")
    return np.searchsorted(grid.boundaries[feature], values, side="right")


def representative_value(grid: BinGrid, feature: int, bin_index: int) -> float:
    """The concrete value assigned to a feature when a move enters a bin.

    Interior bins use their midpoint. The open-ended extreme bins use the
    outer boundary offset by half the interior width, which keeps the value
    analytic and independent of whatever outliers the data happens to have.
    """
    if grid.degenerate[feature]:
        raise GridError(f"feature {feature} is degenerate (zero variance)")
    if not 0 <= bin_index < grid.n_bins:
        raise GridError(
            f"bin index {bin_index} out of range for n_bins={grid.n_bins}"
        )
    cuts = grid.boundaries[feature]
    half = grid.interior_width[feature] / 2.0
    if bin_index == 0:
        return float(cuts[0] - half)
    if bin_index == grid.n_bins - 1:
        return float(cuts[-1] + half)
    return float((cuts[bin_index - 1] + cuts[bin_index]) / 2.0)
