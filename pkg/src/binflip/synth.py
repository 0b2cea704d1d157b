"""Synthetic credit-screening dataset for demos and end-to-end tests.

Mimics the shape of real credit-bureau tables: one dominant aggregate risk
score, a spread of moderately informative account/history features, and one
constant bookkeeping column. All informative features load on a shared
latent "borrower quality" factor, as bureau attributes do in practice, so
applicants far from the decision boundary are bad (or good) across the
board. That correlation is what makes extreme instances hard to flip under
the w/l budgets: fixing five features still leaves the rest pulling the
prediction back.

Labels are drawn from a logistic model of the standardized features, so a
trained model recovers a known structure with the risk score on top.
"""

from __future__ import annotations

import sys

import numpy as np

from .dataset import Dataset
from .model import sigmoid

__all__ = ["RISK_FEATURE", "TIME_FEATURES", "credit_dataset", "write_credit_csv"]

RISK_FEATURE = "risk_score"
TIME_FEATURES = ("months_since_last_delinquency", "avg_months_in_file")

# (name, loading on the latent quality factor, weight on the standardized
# value in the label model). Negative loadings: worse borrowers have more of
# it. The constant column carries neither.
_STRUCTURE = (
    ("risk_score", 0.80, 2.4),
    ("pct_trades_never_delinquent", 0.70, 0.9),
    ("months_since_last_delinquency", 0.65, 0.8),
    ("avg_months_in_file", 0.70, 0.9),
    ("num_satisfactory_trades", 0.60, 0.7),
    ("num_trades_open_12m", -0.45, -0.55),
    ("revolving_utilization", -0.70, -1.1),
    ("num_recent_inquiries", -0.55, -0.6),
    ("net_fraction_revolving_burden", -0.60, -0.8),
    ("num_banks_high_util", -0.50, -0.5),
)

# labels = Bernoulli(sigmoid(logit / _TEMPERATURE)): softens the otherwise
# near-separable latent structure to a realistic ~0.85 accuracy ceiling
_TEMPERATURE = 2.4


def credit_dataset(n_rows: int = 1500, seed: int = 7) -> Dataset:
    """Generate the synthetic table; deterministic for a given seed."""
    if n_rows < 2:
        raise ValueError("n_rows must be at least 2")
    rng = np.random.default_rng(seed)

    quality = rng.normal(0.0, 1.0, n_rows)

    def factor(loading: float) -> np.ndarray:
        noise = rng.normal(0.0, 1.0, n_rows)
        return loading * quality + np.sqrt(1.0 - loading * loading) * noise

    g = {name: factor(loading) for name, loading, _ in _STRUCTURE}

    columns = {
        "risk_score": np.round(70.0 + 9.0 * g["risk_score"], 1),
        "pct_trades_never_delinquent": np.round(
            np.clip(88.0 + 8.0 * g["pct_trades_never_delinquent"], 0.0, 100.0), 1
        ),
        "months_since_last_delinquency": np.round(
            np.maximum(0.0, 26.0 + 15.0 * g["months_since_last_delinquency"]), 1
        ),
        "avg_months_in_file": np.round(
            np.maximum(3.0, 78.0 + 21.0 * g["avg_months_in_file"]), 1
        ),
        "num_satisfactory_trades": np.maximum(
            0.0, np.round(21.0 + 7.0 * g["num_satisfactory_trades"])
        ),
        "num_trades_open_12m": np.maximum(0.0, np.round(2.1 + 1.7 * g["num_trades_open_12m"])),
        # heavy right tails, as utilization and inquiry counts have in practice
        "revolving_utilization": np.round(np.exp(3.2 + 0.75 * g["revolving_utilization"]), 2),
        "num_recent_inquiries": np.round(np.exp(0.5 + 0.7 * g["num_recent_inquiries"])),
        "net_fraction_revolving_burden": np.round(
            np.clip(33.0 + 20.0 * g["net_fraction_revolving_burden"], 0.0, 200.0), 1
        ),
        "num_banks_high_util": np.maximum(0.0, np.round(1.0 + 1.2 * g["num_banks_high_util"])),
    }

    logit = np.zeros(n_rows)
    for name, _, weight in _STRUCTURE:
        col = columns[name]
        logit += weight * (col - col.mean()) / col.std()
    targets = rng.binomial(1, sigmoid(logit / _TEMPERATURE))

    names = tuple(name for name, _, _ in _STRUCTURE) + ("bureau_record_flag",)
    rows = np.column_stack([*(columns[n] for n, _, _ in _STRUCTURE), np.ones(n_rows)])
    return Dataset(
        feature_names=names,
        rows=rows,
        targets=targets,
        target_name="approved",
    )


def write_credit_csv(path, n_rows: int = 1500, seed: int = 7) -> Dataset:
    """Write the synthetic table as CSV and return it."""
    ds = credit_dataset(n_rows=n_rows, seed=seed)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join((*ds.feature_names, ds.target_name)) + "\n")
        for row, target in zip(ds.rows, ds.targets):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(target)}\n")
    return ds


if __name__ == "__main__":  # python -m binflip.synth OUT.csv [N_ROWS] [SEED]
    out = sys.argv[1] if len(sys.argv) > 1 else "credit.csv"
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 1500
    s = int(sys.argv[3]) if len(sys.argv) > 3 else 7
    written = write_credit_csv(out, n_rows=n, seed=s)
    print(f"wrote {written.n_rows} rows x {written.n_features} features to {out}")
