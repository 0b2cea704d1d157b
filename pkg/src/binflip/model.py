"""Probability predictors: the trainable logistic model and prediction utilities.

Anything with a ``predict_proba`` method mapping an (N, F) batch to N
probabilities of the positive class can drive the search; the built-in
logistic model is the dependency-free default, and
:class:`binflip.external.ExternalPredictor` bridges to out-of-process models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

from .dataset import Dataset

__all__ = [
    "Predictor",
    "LogisticModel",
    "TrainMetrics",
    "TrainingDivergedError",
    "ModelFileError",
    "Correctness",
    "sigmoid",
    "log_loss_and_gradient",
    "train_logistic",
    "predict_class",
    "correctness_label",
    "save_model",
    "load_model",
]

DEFAULT_L2 = 1e-3
DEFAULT_EPOCHS = 500
DEFAULT_LEARNING_RATE = 0.1


class TrainingDivergedError(RuntimeError):
    """Training hit a non-finite loss (learning rate too large)."""


class ModelFileError(ValueError):
    """A model file is missing fields or structurally invalid."""


@runtime_checkable
class Predictor(Protocol):
    """Contract the search consumes: batch in, positive-class probabilities out.

    Implementations must be deterministic and return finite values in [0, 1].
    """

    def predict_proba(self, X) -> np.ndarray: ...


class Correctness(str, Enum):
    TP = "TP"
    FP = "FP"
    TN = "TN"
    FN = "FN"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class TrainMetrics:
    accuracy: float
    tp: int
    fp: int
    tn: int
    fn: int


def sigmoid(t: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass(frozen=True)
class LogisticModel:
    """L2-regularized logistic regression over standardized features.

    Inputs are standardized with the training-set (mean, std) stored on the
    model, so callers always pass raw feature units. Zero-variance features
    contribute a standardized value of 0 and therefore never influence the
    output.
    """

    weights: np.ndarray
    intercept: float
    means: np.ndarray
    stds: np.ndarray
    feature_names: tuple[str, ...]
    l2_penalty: float = 0.0
    train_metrics: TrainMetrics | None = None

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float, copy=True)
        mu = np.array(self.means, dtype=float, copy=True)
        sd = np.array(self.stds, dtype=float, copy=True)
        if not (w.shape == mu.shape == sd.shape and w.ndim == 1):
            raise ValueError("weights, means and stds must be 1-D and the same length")
        if len(self.feature_names) != w.shape[0]:
            raise ValueError("feature_names length does not match weights")
        for arr in (w, mu, sd):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "stds", sd)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        safe = np.where(self.stds > 0, self.stds, 1.0)
        z = (X - self.means) / safe
        return np.where(self.stds > 0, z, 0.0)

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected a batch of shape (N, {self.n_features}), got {X.shape}"
            )
        z = self._standardize(X)
        # per-row reduction, not matmul: BLAS kernels vary with batch shape,
        # and a one-ULP drift between batched and single-row scores could
        # disagree about a flip exactly at the 0.5 boundary
        scores = np.add.reduce(z * self.weights, axis=1) + self.intercept
        return sigmoid(scores)

    def predict_one(self, x) -> float:
        return float(self.predict_proba(np.asarray(x, dtype=float)[None, :])[0])


def log_loss_and_gradient(
    weights: np.ndarray,
    intercept: float,
    Z: np.ndarray,
    y: np.ndarray,
    l2_penalty: float,
) -> tuple[float, np.ndarray, float]:
    """Mean log loss with an L2 penalty on the weights (not the intercept).

    Returns (loss, d_loss/d_weights, d_loss/d_intercept). Exposed separately
    so the analytic gradient can be checked against finite differences.
    """
    s = Z @ weights + intercept
    # log(1 + e^s) - y*s is -log p(y|s) for y in {0, 1}
    loss = float(np.mean(np.logaddexp(0.0, s) - y * s))
    loss += 0.5 * l2_penalty * float(weights @ weights)
    residual = sigmoid(s) - y
    grad_w = Z.T @ residual / Z.shape[0] + l2_penalty * weights
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def train_logistic(
    dataset: Dataset,
    l2_penalty: float = DEFAULT_L2,
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    seed: int = 0,
) -> LogisticModel:
    """Fit the logistic model by full-batch gradient descent.

    Deterministic: weights start at zero (the seed only matters for future
    non-zero initialization schemes and is accepted for interface stability).
    Raises :class:`TrainingDivergedError` if the loss goes non-finite.
    """
    if l2_penalty < 0:
        raise ValueError("l2_penalty must be non-negative")
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    del seed  # inert with zero initialization

    means = dataset.rows.mean(axis=0)
    stds = dataset.rows.std(axis=0)
    stds = np.where(dataset.rows.min(axis=0) == dataset.rows.max(axis=0), 0.0, stds)
    safe = np.where(stds > 0, stds, 1.0)
    Z = np.where(stds > 0, (dataset.rows - means) / safe, 0.0)
    y = dataset.targets.astype(float)

    w = np.zeros(dataset.n_features)
    b = 0.0
    for _ in range(epochs):
        loss, grad_w, grad_b = log_loss_and_gradient(w, b, Z, y, l2_penalty)
        if not np.isfinite(loss):
            raise TrainingDivergedError(
                f"log loss became non-finite (learning_rate={learning_rate})"
            )
        w = w - learning_rate * grad_w
        b = b - learning_rate * grad_b
    if not (np.isfinite(w).all() and np.isfinite(b)):
        raise TrainingDivergedError(
            f"weights became non-finite (learning_rate={learning_rate})"
        )

    p = sigmoid(Z @ w + b)
    predicted = (p > 0.5).astype(np.int64)
    actual = dataset.targets
    tp = int(np.sum((predicted == 1) & (actual == 1)))
    fp = int(np.sum((predicted == 1) & (actual == 0)))
    tn = int(np.sum((predicted == 0) & (actual == 0)))
    fn = int(np.sum((predicted == 0) & (actual == 1)))
    metrics = TrainMetrics(
        accuracy=float((tp + tn) / dataset.n_rows), tp=tp, fp=fp, tn=tn, fn=fn
    )
    return LogisticModel(
        weights=w,
        intercept=float(b),
        means=means,
        stds=stds,
        feature_names=dataset.feature_names,
        l2_penalty=l2_penalty,
        train_metrics=metrics,
    )


def predict_class(p: float) -> int:
    """1 (positive) iff p is strictly above 0.5; exactly 0.5 is negative."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p!r}")
    return 1 if p > 0.5 else 0


def correctness_label(p: float, truth: int | None) -> Correctness:
    """TP/FP/TN/FN against ground truth, UNKNOWN when none is available."""
    if truth is None:
        return Correctness.UNKNOWN
    predicted = predict_class(p)
    if predicted == 1:
        return Correctness.TP if truth == 1 else Correctness.FP
    return Correctness.TN if truth == 0 else Correctness.FN


def _fmt(x: float) -> str:
    # 17 significant digits round-trip any float64 bit-exactly.
    return format(float(x), ".17g")


def save_model(model: LogisticModel, path) -> None:
    """Write the model as JSON with 17-significant-digit decimal numbers."""
    names = json.dumps(list(model.feature_names), ensure_ascii=False)
    weights = ",".join(_fmt(v) for v in model.weights)
    means = ",".join(_fmt(v) for v in model.means)
    stds = ",".join(_fmt(v) for v in model.stds)
    text = (
        '{"type":"logistic"'
        f',"weights":[{weights}]'
        f',"intercept":{_fmt(model.intercept)}'
        f',"means":[{means}]'
        f',"stds":[{stds}]'
        f',"feature_names":{names}}}\n'
    )
    Path(path).write_text(text, encoding="utf-8")


def load_model(path) -> LogisticModel:
    """Read a model file written by :func:`save_model`."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc}") from None
    if not isinstance(obj, dict) or obj.get("type") != "logistic":
        raise ModelFileError("model file must declare \"type\": \"logistic\"")
    try:
        weights = [float(v) for v in obj["weights"]]
        intercept = float(obj["intercept"])
        means = [float(v) for v in obj["means"]]
        stds = [float(v) for v in obj["stds"]]
        names = tuple(str(v) for v in obj["feature_names"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"model file is malformed: {exc}") from None
    if not (len(weights) == len(means) == len(stds) == len(names)):
        raise ModelFileError("model file arrays disagree on feature count")
    return LogisticModel(
        weights=np.array(weights),
        intercept=intercept,
        means=np.array(means),
        stds=np.array(stds),
        feature_names=names,
    )
