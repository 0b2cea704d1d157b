"""Counterfactual explanations for binary classifiers on numeric tables.

Features are discretized into Gaussian-scaled bins; a greedy search moves
one feature one bin at a time until the predicted class flips or the move
budget runs out. Ships a CLI and an HTTP JSON API.
"""

from .context import (
    DensityCondition,
    DensityHistogram,
    InstanceSummary,
    density_histogram,
    instance_summary,
    summarize_values,
    z_scores,
)
from .dataset import (
    BinGrid,
    Dataset,
    DatasetError,
    FeatureStats,
    GridError,
    bin_of,
    build_bins,
    compute_feature_stats,
    load_csv,
    representative_value,
)
from .external import (
    ExternalPredictor,
    ExternalPredictorError,
    MalformedResponseError,
    PredictorTimeoutError,
    ProbabilityRangeError,
    ResponseLengthError,
)
from .model import (
    Correctness,
    LogisticModel,
    ModelFileError,
    Predictor,
    TrainingDivergedError,
    TrainMetrics,
    load_model,
    predict_class,
    save_model,
    train_logistic,
)
from .search import (
    CounterfactualResult,
    FeatureChange,
    Move,
    SearchConfig,
    SearchStatus,
    generate_counterfactual,
)

__version__ = "0.1.0"

__all__ = [
    "BinGrid",
    "Correctness",
    "CounterfactualResult",
    "Dataset",
    "DatasetError",
    "DensityCondition",
    "DensityHistogram",
    "ExternalPredictor",
    "ExternalPredictorError",
    "FeatureChange",
    "FeatureStats",
    "GridError",
    "InstanceSummary",
    "LogisticModel",
    "MalformedResponseError",
    "ModelFileError",
    "Move",
    "Predictor",
    "PredictorTimeoutError",
    "ProbabilityRangeError",
    "ResponseLengthError",
    "SearchConfig",
    "SearchStatus",
    "TrainMetrics",
    "TrainingDivergedError",
    "bin_of",
    "build_bins",
    "compute_feature_stats",
    "density_histogram",
    "generate_counterfactual",
    "instance_summary",
    "load_csv",
    "load_model",
    "predict_class",
    "representative_value",
    "save_model",
    "summarize_values",
    "train_logistic",
    "z_scores",
    "__version__",
]
