import math
import sys
from pathlib import Path

import numpy as np
import pytest

from binflip.external import (
    ExternalPredictor,
    MalformedResponseError,
    PredictorTimeoutError,
    ProbabilityRangeError,
    ResponseLengthError,
)

STUB = str(Path(__file__).with_name("stub_predictor.py"))


def stub(mode="ok", timeout_ms=10_000):
    return ExternalPredictor([sys.executable, STUB, mode], timeout_ms=timeout_ms)


def test_constant_half_predictor():
    with stub("half") as p:
        out = p.predict_proba(np.zeros((3, 2)))
    assert out.tolist() == [0.5, 0.5, 0.5]


def test_round_trip_matches_stub_formula():
    rng = np.random.default_rng(3)
    with stub() as p:
        for _ in range(5):
            batch = rng.normal(size=(int(rng.integers(1, 8)), 3))
            out = p.predict_proba(batch)
            expected = [1.0 / (1.0 + math.exp(-s)) for s in batch.sum(axis=1)]
            assert out.tolist() == pytest.approx(expected, rel=1e-12)
            assert len(out) == len(batch)


def test_many_requests_reuse_one_process():
    with stub() as p:
        first = p.predict_proba(np.array([[0.3, 0.2]]))
        for _ in range(20):
            again = p.predict_proba(np.array([[0.3, 0.2]]))
            assert again.tolist() == first.tolist()


def test_length_mismatch_is_its_own_error():
    with stub("truncate") as p:
        with pytest.raises(ResponseLengthError):
            p.predict_proba(np.zeros((3, 2)))


def test_extra_probabilities_rejected():
    with stub("extra") as p:
        with pytest.raises(ResponseLengthError):
            p.predict_proba(np.zeros((3, 2)))


def test_non_json_response_is_malformed():
    with stub("badjson") as p:
        with pytest.raises(MalformedResponseError):
            p.predict_proba(np.zeros((1, 2)))


def test_non_object_response_is_malformed():
    with stub("notdict") as p:
        with pytest.raises(MalformedResponseError):
            p.predict_proba(np.zeros((1, 2)))


def test_wrong_id_is_malformed():
    with stub("wrong_id") as p:
        with pytest.raises(MalformedResponseError):
            p.predict_proba(np.zeros((1, 2)))


def test_null_probability_is_malformed():
    with stub("nullprob") as p:
        with pytest.raises(MalformedResponseError):
            p.predict_proba(np.zeros((1, 2)))


def test_out_of_range_probability_is_its_own_error():
    with stub("out_of_range") as p:
        with pytest.raises(ProbabilityRangeError):
            p.predict_proba(np.zeros((1, 2)))


def test_timeout_kills_and_raises():
    with stub("silent", timeout_ms=300) as p:
        with pytest.raises(PredictorTimeoutError):
            p.predict_proba(np.zeros((1, 2)))


def test_dead_process_is_malformed_not_hang():
    with stub("die", timeout_ms=5_000) as p:
        with pytest.raises(MalformedResponseError):
            p.predict_proba(np.zeros((1, 2)))


def test_string_command_accepted():
    p = ExternalPredictor(f"{sys.executable} {STUB} half")
    try:
        assert p.predict_proba(np.zeros((1, 1))).tolist() == [0.5]
    finally:
        p.close()
