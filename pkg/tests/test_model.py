import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binflip.dataset import load_csv
from binflip.model import (
    Correctness,
    LogisticModel,
    ModelFileError,
    TrainingDivergedError,
    correctness_label,
    load_model,
    log_loss_and_gradient,
    predict_class,
    save_model,
    sigmoid,
    train_logistic,
)


def make_model(weights, intercept=0.0, means=None, stds=None):
    w = np.asarray(weights, dtype=float)
    return LogisticModel(
        weights=w,
        intercept=intercept,
        means=np.zeros(w.size) if means is None else np.asarray(means, float),
        stds=np.ones(w.size) if stds is None else np.asarray(stds, float),
        feature_names=tuple(f"f{i}" for i in range(w.size)),
    )


# ------------------------------------------------------------- prediction


def test_predict_proba_matches_formula():
    m = make_model([2.0, -1.0], intercept=0.5, means=[1.0, 3.0], stds=[2.0, 4.0])
    x = np.array([[3.0, 1.0]])
    z = (x[0] - np.array([1.0, 3.0])) / np.array([2.0, 4.0])
    expected = 1.0 / (1.0 + math.exp(-(2.0 * z[0] - 1.0 * z[1] + 0.5)))
    assert m.predict_proba(x)[0] == pytest.approx(expected, rel=1e-12)


def test_zero_std_feature_contributes_nothing():
    m = make_model([5.0, 1.0], stds=[0.0, 1.0])
    a = m.predict_proba(np.array([[123.0, 0.3]]))[0]
    b = m.predict_proba(np.array([[-7.0, 0.3]]))[0]
    assert a == b


def test_sigmoid_extremes_are_finite():
    p = sigmoid(np.array([-1e6, -50.0, 0.0, 50.0, 1e6]))
    assert np.all(np.isfinite(p))
    assert p[0] == 0.0 or p[0] < 1e-300
    assert p[-1] == 1.0 or p[-1] > 1 - 1e-15
    assert p[2] == 0.5


@given(
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_batch_equals_concat_of_singles(n_features, n_rows, seed):
    rng = np.random.default_rng(seed)
    m = make_model(rng.normal(size=n_features), intercept=float(rng.normal()))
    batch = rng.normal(size=(n_rows, n_features))
    whole = m.predict_proba(batch)
    singles = [m.predict_proba(batch[i : i + 1])[0] for i in range(n_rows)]
    assert whole.tolist() == singles


@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.floats(min_value=0.0, max_value=5.0),
)
def test_monotone_in_positive_weight_feature(seed, bump):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=3)
    w[0] = abs(w[0]) + 0.1
    m = make_model(w, intercept=float(rng.normal()))
    x = rng.normal(size=(1, 3))
    x2 = x.copy()
    x2[0, 0] += bump
    assert m.predict_proba(x2)[0] >= m.predict_proba(x)[0]


def test_predict_proba_requires_2d():
    m = make_model([1.0])
    with pytest.raises(ValueError):
        m.predict_proba(np.array([1.0]))


# --------------------------------------------------------------- gradient


def finite_difference_gradient(weights, intercept, Z, y, l2, step=1e-5):
    """Central differences around the analytic gradient's inputs."""

    def loss_at(w, b):
        return log_loss_and_gradient(w, b, Z, y, l2)[0]

    grad_w = np.zeros_like(weights)
    for j in range(weights.size):
        up = weights.copy()
        down = weights.copy()
        up[j] += step
        down[j] -= step
        grad_w[j] = (loss_at(up, intercept) - loss_at(down, intercept)) / (2 * step)
    grad_b = (loss_at(weights, intercept + step) - loss_at(weights, intercept - step)) / (
        2 * step
    )
    return grad_w, grad_b


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    n, f = int(rng.integers(2, 50)), int(rng.integers(1, 6))
    Z = rng.normal(size=(n, f))
    y = rng.integers(0, 2, size=n).astype(float)
    w = rng.normal(size=f)
    b = float(rng.normal())
    l2 = float(rng.uniform(0, 0.1))
    _, gw, gb = log_loss_and_gradient(w, b, Z, y, l2)
    fw, fb = finite_difference_gradient(w, b, Z, y, l2)
    assert np.max(np.abs(gw - fw)) < 1e-6
    assert abs(gb - fb) < 1e-6


# --------------------------------------------------------------- training


def test_train_separable_sign_and_accuracy():
    rows = "\n".join(["-1,0"] * 50 + ["1,1"] * 50)
    ds = load_csv(f"x,y\n{rows}\n".encode())
    m = train_logistic(ds, l2_penalty=0.01)
    assert m.weights[0] > 0
    assert m.train_metrics.accuracy == 1.0


def test_train_all_positive_targets():
    ds = load_csv(b"a,y\n1,1\n2,1\n3,1\n4,1\n")
    m = train_logistic(ds)
    assert np.all(m.predict_proba(ds.rows) > 0.5)


def test_train_zero_lr_keeps_zero_init():
    ds = load_csv(b"a,y\n-1,0\n1,1\n")
    m = train_logistic(ds, epochs=1, learning_rate=0.0)
    assert m.weights[0] == 0.0 and m.intercept == 0.0
    assert np.all(m.predict_proba(ds.rows) == 0.5)


def test_train_seed_is_inert(toy_dataset):
    a = train_logistic(toy_dataset, seed=0)
    b = train_logistic(toy_dataset, seed=12345)
    assert a.weights.tolist() == b.weights.tolist()
    assert a.intercept == b.intercept


@pytest.mark.filterwarnings("ignore:overflow")
def test_train_divergence_raises(toy_dataset):
    with pytest.raises(TrainingDivergedError):
        train_logistic(toy_dataset, learning_rate=1e160, epochs=5)


def test_train_metrics_confusion_counts(toy_dataset):
    m = train_logistic(toy_dataset)
    t = m.train_metrics
    assert (t.tp, t.fp, t.tn, t.fn) == (2, 0, 2, 0)
    assert t.accuracy == 1.0


# ------------------------------------------------------- class/correctness


def test_predict_class_threshold():
    assert predict_class(0.51) == 1
    assert predict_class(0.5) == 0  # exactly 50% is negative
    assert predict_class(0.0) == 0


def test_predict_class_rejects_out_of_range():
    with pytest.raises(ValueError):
        predict_class(1.2)


def test_correctness_labels():
    assert correctness_label(0.7, 1) is Correctness.TP
    assert correctness_label(0.29, 0) is Correctness.TN
    assert correctness_label(0.7, None) is Correctness.UNKNOWN
    assert correctness_label(0.7, 0) is Correctness.FP
    assert correctness_label(0.3, 1) is Correctness.FN
    assert correctness_label(0.5, 1) is Correctness.FN  # 0.5 predicts negative


# ------------------------------------------------------------- model file


def test_save_load_round_trip_bit_exact(tmp_path, credit, credit_model):
    path = tmp_path / "m.json"
    save_model(credit_model, path)
    loaded = load_model(path)
    assert loaded.weights.tolist() == credit_model.weights.tolist()
    assert loaded.intercept == credit_model.intercept
    assert loaded.means.tolist() == credit_model.means.tolist()
    assert loaded.stds.tolist() == credit_model.stds.tolist()
    assert loaded.feature_names == credit_model.feature_names
    # and predictions agree exactly, not just approximately
    assert loaded.predict_proba(credit.rows).tolist() == credit_model.predict_proba(
        credit.rows
    ).tolist()


def test_model_file_shape(tmp_path, credit_model):
    path = tmp_path / "m.json"
    save_model(credit_model, path)
    doc = json.loads(path.read_text())
    assert doc["type"] == "logistic"
    assert set(doc) == {"type", "weights", "intercept", "means", "stds", "feature_names"}
    assert len(doc["weights"]) == len(doc["feature_names"])


def test_load_model_rejects_bad_type(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"type":"tree","weights":[1],"intercept":0,"means":[0],"stds":[1],"feature_names":["a"]}')
    with pytest.raises(ModelFileError):
        load_model(p)


def test_load_model_rejects_length_mismatch(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"type":"logistic","weights":[1,2],"intercept":0,"means":[0],"stds":[1],"feature_names":["a"]}')
    with pytest.raises(ModelFileError):
        load_model(p)


def test_load_model_rejects_non_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("hello")
    with pytest.raises(ModelFileError):
        load_model(p)
