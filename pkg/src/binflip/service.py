"""HTTP JSON API over one dataset + model session.

Single-session: the dataset, grid, and model are fixed at startup and
immutable afterwards, so requests share them freely. Responses are rendered
through one canonical serializer; identical requests produce byte-identical
bodies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .context import (
    DensityCondition,
    density_histogram,
    summarize_values,
)
from .dataset import BinGrid, Dataset, FeatureStats, build_bins, compute_feature_stats
from .external import ExternalPredictorError
from .model import LogisticModel, Predictor, correctness_label, predict_class
from .search import CounterfactualResult, SearchConfig, generate_counterfactual
from .serialize import (
    class_name,
    dumps_canonical,
    histogram_to_jsonable,
    probability_display,
    result_to_jsonable,
    summary_to_jsonable,
)

__all__ = ["SessionState", "build_session", "create_app", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1

DEFAULT_PORT = 8571
DEFAULT_PAGE_LIMIT = 50


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass(frozen=True)
class SessionState:
    """Everything one service process serves. Immutable after construction."""

    dataset: Dataset
    stats: list[FeatureStats]
    grid: BinGrid
    model: Predictor
    initial_locks: frozenset[str]
    config_defaults: SearchConfig
    row_probabilities: np.ndarray = field(repr=False)
    targets_exposed: bool = True

    def lock_indices(self, names) -> frozenset[int]:
        by_name = {n: i for i, n in enumerate(self.dataset.feature_names)}
        indices = set()
        for name in names:
            if name not in by_name:
                raise ApiError(400, "unknown_lock", f"unknown lock feature: {name!r}")
            indices.add(by_name[name])
        return frozenset(indices)


def build_session(
    dataset: Dataset,
    model: Predictor,
    n_bins: int = 10,
    w: int = 5,
    l: int = 5,
    initial_locks=(),
    max_iterations: int | None = None,
    targets_exposed: bool = True,
) -> SessionState:
    """Precompute the grid and per-row probabilities for a dataset + model."""
    names = set(dataset.feature_names)
    for name in initial_locks:
        if name not in names:
            raise ValueError(f"initial lock {name!r} is not a feature of the dataset")
    stats = compute_feature_stats(dataset)
    grid = build_bins(stats, n_bins)
    probabilities = np.asarray(model.predict_proba(dataset.rows), dtype=float).reshape(-1)
    if probabilities.shape[0] != dataset.n_rows:
        raise ValueError("model returned a probability vector of the wrong length")
    probabilities.setflags(write=False)
    session = SessionState(
        dataset=dataset,
        stats=stats,
        grid=grid,
        model=model,
        initial_locks=frozenset(initial_locks),
        config_defaults=SearchConfig(w=w, l=l, max_iterations=max_iterations),
        row_probabilities=probabilities,
        targets_exposed=targets_exposed,
    )
    # resolve now so bad lock names fail at startup, not per request
    session.lock_indices(session.initial_locks)
    return session


class CanonicalJSONResponse(Response):
    media_type = "application/json"

    def render(self, content) -> bytes:
        return dumps_canonical(content).encode("utf-8")


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ApiError(400, "bad_parameter", f"{name} must be an integer") from None


def _row_entry(session: SessionState, index: int) -> dict:
    p = float(session.row_probabilities[index])
    truth = int(session.dataset.targets[index]) if session.targets_exposed else None
    return {
        "index": index,
        "probability": p,
        "probability_display": probability_display(p),
        "predicted_class": class_name(predict_class(p)),
        "correctness": correctness_label(p, truth).value,
    }


def _parse_explain_request(session: SessionState, payload) -> tuple[np.ndarray, int, SearchConfig]:
    if not isinstance(payload, dict):
        raise ApiError(400, "bad_request", "request body must be a JSON object")
    allowed = {"instance", "locks", "w", "l"}
    unknown = set(payload) - allowed
    if unknown:
        raise ApiError(400, "bad_request", f"unknown fields: {sorted(unknown)}")
    if "instance" not in payload:
        raise ApiError(400, "bad_request", "missing field: instance")

    defaults = session.config_defaults
    w, l = defaults.w, defaults.l
    if "w" in payload:
        if not isinstance(payload["w"], int) or isinstance(payload["w"], bool) or payload["w"] < 1:
            raise ApiError(400, "bad_parameter", "w must be an integer >= 1")
        w = payload["w"]
    if "l" in payload:
        if not isinstance(payload["l"], int) or isinstance(payload["l"], bool) or payload["l"] < 1:
            raise ApiError(400, "bad_parameter", "l must be an integer >= 1")
        l = payload["l"]

    # a request's lock set fully replaces the session defaults, no merging
    if "locks" in payload:
        locks = payload["locks"]
        if not isinstance(locks, list) or not all(isinstance(n, str) for n in locks):
            raise ApiError(400, "bad_parameter", "locks must be a list of feature names")
        lock_names = locks
    else:
        lock_names = sorted(session.initial_locks)
    lock_idx = session.lock_indices(lock_names)

    instance = payload["instance"]
    if isinstance(instance, bool):
        raise ApiError(400, "bad_parameter", "instance must be a row index or a list of numbers")
    if isinstance(instance, int):
        if not 0 <= instance < session.dataset.n_rows:
            raise ApiError(404, "unknown_instance", f"no row with index {instance}")
        values = session.dataset.rows[instance]
        index = instance
    elif isinstance(instance, list):
        if len(instance) != session.dataset.n_features or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in instance
        ):
            raise ApiError(
                400,
                "bad_parameter",
                f"instance vector must hold {session.dataset.n_features} numbers",
            )
        values = np.array(instance, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ApiError(400, "bad_parameter", "instance values must be finite")
        index = -1
    else:
        raise ApiError(400, "bad_parameter", "instance must be a row index or a list of numbers")

    config = SearchConfig(w=w, l=l, locks=lock_idx, max_iterations=defaults.max_iterations)
    return np.asarray(values, dtype=float), index, config


def create_app(session: SessionState, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="binflip", openapi_url=None, docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def error_response(status: int, code: str, message: str) -> CanonicalJSONResponse:
        body = {"schema_version": SCHEMA_VERSION, "error": {"code": code, "message": message}}
        return CanonicalJSONResponse(body, status_code=status)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(ExternalPredictorError)
    async def _predictor_error(request: Request, exc: ExternalPredictorError):
        return error_response(502, "external_predictor_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return error_response(400, "bad_request", "malformed request")

    @app.get("/api/v1/meta", response_class=CanonicalJSONResponse)
    def meta():
        metrics = None
        model = session.model
        if isinstance(model, LogisticModel) and model.train_metrics is not None:
            m = model.train_metrics
            metrics = {
                "accuracy": float(m.accuracy),
                "tp": m.tp,
                "fp": m.fp,
                "tn": m.tn,
                "fn": m.fn,
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "feature_names": list(session.dataset.feature_names),
            "n_bins": session.grid.n_bins,
            "w": session.config_defaults.w,
            "l": session.config_defaults.l,
            "initial_locks": sorted(session.initial_locks),
            "n_rows": session.dataset.n_rows,
            "model_metrics": metrics,
        }

    @app.get("/api/v1/instances", response_class=CanonicalJSONResponse)
    def instances(offset: str = "0", limit: str = str(DEFAULT_PAGE_LIMIT)):
        off = _parse_int(offset, "offset")
        lim = _parse_int(limit, "limit")
        if off < 0:
            raise ApiError(400, "bad_parameter", "offset must be >= 0")
        if lim < 1:
            raise ApiError(400, "bad_parameter", "limit must be >= 1")
        stop = min(off + lim, session.dataset.n_rows)
        rows = [_row_entry(session, i) for i in range(min(off, stop), stop)]
        return {
            "schema_version": SCHEMA_VERSION,
            "total": session.dataset.n_rows,
            "offset": off,
            "limit": lim,
            "instances": rows,
        }

    @app.get("/api/v1/instances/{index}/summary", response_class=CanonicalJSONResponse)
    def summary(index: str):
        i = _parse_int(index, "index")
        if not 0 <= i < session.dataset.n_rows:
            raise ApiError(404, "unknown_instance", f"no row with index {i}")
        truth = int(session.dataset.targets[i]) if session.targets_exposed else None
        s = summarize_values(
            session.dataset.rows[i],
            session.stats,
            session.grid,
            session.model,
            truth=truth,
            index=i,
        )
        body = summary_to_jsonable(s)
        body["schema_version"] = SCHEMA_VERSION
        return body

    @app.post("/api/v1/explain", response_class=CanonicalJSONResponse)
    async def explain(request: Request):
        try:
            payload = await request.json()
        except Exception:
            raise ApiError(400, "bad_request", "request body is not valid JSON") from None
        values, index, config = _parse_explain_request(session, payload)
        result: CounterfactualResult = generate_counterfactual(
            values, session.model, session.grid, config
        )
        body = result_to_jsonable(result, session.dataset.feature_names)
        body["schema_version"] = SCHEMA_VERSION
        body["instance_index"] = index
        body["locks"] = sorted(session.dataset.feature_names[i] for i in config.locks)
        body["w"] = config.w
        body["l"] = config.l
        return CanonicalJSONResponse(body)

    @app.get("/api/v1/distributions", response_class=CanonicalJSONResponse)
    def distributions(condition: str = "all"):
        try:
            cond = DensityCondition(condition)
        except ValueError:
            raise ApiError(
                400, "bad_parameter", "condition must be one of all, positive, negative"
            ) from None
        body = histogram_to_jsonable(
            density_histogram(session.dataset, session.grid, cond),
            session.dataset.feature_names,
        )
        body["schema_version"] = SCHEMA_VERSION
        return body

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
