"""Greedy counterfactual search over the bin grid.

Starting from an instance's raw values, the search repeatedly tries moving
each unlocked feature one bin up and one bin down, asks the model for the
probability of every candidate, and applies the single move that pushes the
output furthest toward the opposite class. It stops when the predicted class
flips, when no candidate strictly improves (local optimum), or when the
constraints leave no legal move.

Two constraints shape the candidate set: at most ``w`` features may be
displaced from their original bin at any time (a feature moved back stops
counting), and no feature may end up more than ``l`` bins from where it
started. Locked and zero-variance features never move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .dataset import BinGrid, bin_of, representative_value
from .model import Predictor, predict_class

__all__ = [
    "SearchConfig",
    "SearchStatus",
    "Move",
    "FeatureChange",
    "CounterfactualResult",
    "enumerate_candidates",
    "greedy_step",
    "generate_counterfactual",
]


class SearchStatus(str, Enum):
    FLIPPED = "FLIPPED"
    LOCAL_OPTIMUM = "LOCAL_OPTIMUM"
    CONSTRAINTS_EXHAUSTED = "CONSTRAINTS_EXHAUSTED"
    MAX_ITERATIONS = "MAX_ITERATIONS"


@dataclass(frozen=True)
class SearchConfig:
    """Search constraints: ``w`` features changed, ``l`` bins per feature."""

    w: int = 5
    l: int = 5
    locks: frozenset[int] = field(default_factory=frozenset)
    max_iterations: int | None = None

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ValueError("w must be at least 1")
        if self.l < 1:
            raise ValueError("l must be at least 1")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        object.__setattr__(self, "locks", frozenset(self.locks))

    @property
    def iteration_cap(self) -> int:
        # Pure safety net; strict improvement already forces termination.
        return self.max_iterations if self.max_iterations is not None else 4 * self.w * self.l


@dataclass(frozen=True)
class Move:
    """One single-bin step of one feature, with the probability it produces."""

    feature: int
    from_bin: int
    to_bin: int
    new_value: float
    probability_after: float = math.nan


@dataclass(frozen=True)
class FeatureChange:
    """Net change of one feature between the original and final state."""

    feature: int
    original_value: float
    original_bin: int
    final_bin: int
    final_value: float


@dataclass(frozen=True)
class CounterfactualResult:
    status: SearchStatus
    original_probability: float
    final_probability: float
    trace: tuple[Move, ...]
    changes: tuple[FeatureChange, ...]
    direction: int  # predicted class of the original instance

    @property
    def flipped(self) -> bool:
        return self.status is SearchStatus.FLIPPED


def enumerate_candidates(
    current_bins: np.ndarray,
    original_bins: np.ndarray,
    original_values: np.ndarray,
    grid: BinGrid,
    config: SearchConfig,
) -> list[Move]:
    """All single-bin moves legal under the locks and the w/l constraints.

    A move entering a bin takes that bin's representative value, except that
    a move returning a feature to its original bin restores the original raw
    value, so the final state is always exactly "instance plus net changes".
    """
    current_bins = np.asarray(current_bins)
    original_bins = np.asarray(original_bins)
    displaced = int(np.sum(current_bins != original_bins))
    candidates: list[Move] = []
    for f in range(grid.n_features):
        if f in config.locks or grid.degenerate[f]:
            continue
        cur = int(current_bins[f])
        orig = int(original_bins[f])
        for target in (cur + 1, cur - 1):
            if not 0 <= target < grid.n_bins:
                continue
            if abs(target - orig) > config.l:
                continue
            if cur == orig and displaced >= config.w:
                continue  # would displace one feature too many
            if target == orig:
                value = float(original_values[f])
            else:
                value = representative_value(grid, f, target)
            candidates.append(Move(feature=f, from_bin=cur, to_bin=target, new_value=value))
    return candidates


def greedy_step(
    candidates: list[Move],
    model: Predictor,
    current_values: np.ndarray,
    current_probability: float,
    direction: int,
    original_bins: np.ndarray,
) -> Move | None:
    """Pick the candidate with the largest strict improvement, or None.

    Improvement is the probability delta toward the class opposite
    ``direction``. Ties break deterministically: smaller resulting
    displacement from the original bin, then lower feature index, then the
    upward move.
    """
    if not candidates:
        return None
    batch = np.tile(current_values, (len(candidates), 1))
    for i, move in enumerate(candidates):
        batch[i, move.feature] = move.new_value
    probs = np.asarray(model.predict_proba(batch), dtype=float)
    if probs.shape != (len(candidates),):
        raise ValueError(
            f"model returned {probs.shape} probabilities for {len(candidates)} candidates"
        )

    best: Move | None = None
    best_key: tuple | None = None
    for move, p in zip(candidates, probs):
        delta = p - current_probability if direction == 0 else current_probability - p
        if delta <= 0.0:
            continue
        displacement = abs(move.to_bin - int(original_bins[move.feature]))
        key = (delta, -displacement, -move.feature, move.to_bin > move.from_bin)
        if best_key is None or key > best_key:
            best = replace(move, probability_after=float(p))
            best_key = key
    return best


def generate_counterfactual(
    instance,
    model: Predictor,
    grid: BinGrid,
    config: SearchConfig | None = None,
) -> CounterfactualResult:
    """Run the greedy search for one instance.

    Pure function of its arguments; safe to call concurrently over a shared
    model and grid. Unmoved features keep their raw values throughout, so
    the model always sees the instance the user actually has, perturbed only
    by the explanation's moves.
    """
    if config is None:
        config = SearchConfig()
    values = np.array(instance, dtype=float).reshape(-1)
    if values.shape[0] != grid.n_features:
        raise ValueError(
            f"instance has {values.shape[0]} values, grid expects {grid.n_features}"
        )
    if not np.isfinite(values).all():
        raise ValueError("instance values must be finite")
    bad_locks = [f for f in config.locks if not 0 <= f < grid.n_features]
    if bad_locks:
        raise ValueError(f"lock indices out of range: {sorted(bad_locks)}")

    original_values = values.copy()
    original_bins = np.array(
        [-1 if grid.degenerate[f] else bin_of(grid, f, float(values[f])) for f in range(grid.n_features)],
        dtype=np.int64,
    )
    current_bins = original_bins.copy()

    p_original = float(np.asarray(model.predict_proba(values[None, :]), dtype=float)[0])
    direction = predict_class(p_original)
    p_current = p_original

    trace: list[Move] = []
    status = SearchStatus.MAX_ITERATIONS
    for _ in range(config.iteration_cap):
        candidates = enumerate_candidates(
            current_bins, original_bins, original_values, grid, config
        )
        if not candidates:
            status = SearchStatus.CONSTRAINTS_EXHAUSTED
            break
        move = greedy_step(candidates, model, values, p_current, direction, original_bins)
        if move is None:
            status = SearchStatus.LOCAL_OPTIMUM
            break
        values[move.feature] = move.new_value
        current_bins[move.feature] = move.to_bin
        p_current = move.probability_after
        trace.append(move)
        if predict_class(p_current) != direction:
            status = SearchStatus.FLIPPED
            break

    changes = tuple(
        FeatureChange(
            feature=f,
            original_value=float(original_values[f]),
            original_bin=int(original_bins[f]),
            final_bin=int(current_bins[f]),
            final_value=float(values[f]),
        )
        for f in range(grid.n_features)
        if current_bins[f] != original_bins[f]
    )
    return CounterfactualResult(
        status=status,
        original_probability=p_original,
        final_probability=p_current,
        trace=tuple(trace),
        changes=changes,
        direction=direction,
    )
