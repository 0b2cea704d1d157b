"""Canonical JSON shapes shared by the CLI and the HTTP service.

All numbers pass through Python floats, whose repr is the shortest exact
decimal (never more than 17 significant digits), so identical results always
serialize to identical bytes. Probabilities additionally get a fixed
4-decimal display string.
"""

from __future__ import annotations

import json

from .context import DensityHistogram, InstanceSummary
from .search import CounterfactualResult, FeatureChange, Move

__all__ = [
    "dumps_canonical",
    "class_name",
    "probability_display",
    "result_to_jsonable",
    "summary_to_jsonable",
    "histogram_to_jsonable",
]


def dumps_canonical(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


def class_name(predicted: int) -> str:
    return "positive" if predicted == 1 else "negative"


def probability_display(p: float) -> str:
    return f"{p:.4f}"


def _move_to_jsonable(move: Move, feature_names) -> dict:
    return {
        "feature": feature_names[move.feature],
        "from_bin": move.from_bin,
        "to_bin": move.to_bin,
        "new_value": float(move.new_value),
        "probability_after": float(move.probability_after),
    }


def _change_to_jsonable(change: FeatureChange, feature_names) -> dict:
    return {
        "feature": feature_names[change.feature],
        "from_value": float(change.original_value),
        "from_bin": change.original_bin,
        "to_bin": change.final_bin,
        "to_value": float(change.final_value),
    }


def result_to_jsonable(result: CounterfactualResult, feature_names) -> dict:
    return {
        "status": result.status.value,
        "direction": class_name(result.direction),
        "original_probability": float(result.original_probability),
        "original_probability_display": probability_display(result.original_probability),
        "final_probability": float(result.final_probability),
        "final_probability_display": probability_display(result.final_probability),
        "changes": [_change_to_jsonable(c, feature_names) for c in result.changes],
        "trace": [_move_to_jsonable(m, feature_names) for m in result.trace],
    }


def summary_to_jsonable(summary: InstanceSummary) -> dict:
    return {
        "index": summary.index,
        "values": [float(v) for v in summary.values],
        "bins": list(summary.bins),
        "z_scores": [float(v) for v in summary.z_scores],
        "probability": float(summary.probability),
        "probability_display": probability_display(summary.probability),
        "predicted_class": class_name(summary.predicted_class),
        "correctness": summary.correctness.value,
        "sorted_order": list(summary.sorted_order),
    }


def histogram_to_jsonable(histogram: DensityHistogram, feature_names) -> dict:
    features = []
    for f, name in enumerate(feature_names):
        features.append(
            {
                "feature": name,
                "counts": [int(c) for c in histogram.counts[f]],
                "opacities": [float(o) for o in histogram.opacities[f]],
            }
        )
    return {
        "condition": histogram.condition.value,
        "n_bins": int(histogram.counts.shape[1]),
        "features": features,
    }
