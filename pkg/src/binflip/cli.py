"""Command-line entry point: train, explain, batch, serve.

Exit codes are a contract:
  0   success (explain: counterfactual FLIPPED)
  3   explain finished without flipping (any non-FLIPPED status)
  1   data or runtime error
  2   training diverged
  64  usage error (bad flags, unknown lock names)
"""

from __future__ import annotations

import argparse
import socket
import sys

import numpy as np

from .dataset import Dataset, DatasetError, build_bins, compute_feature_stats
from .dataset import load_csv
from .external import ExternalPredictor, ExternalPredictorError
from .model import (
    DEFAULT_EPOCHS,
    DEFAULT_L2,
    DEFAULT_LEARNING_RATE,
    LogisticModel,
    ModelFileError,
    TrainingDivergedError,
    load_model,
    save_model,
    train_logistic,
)
from .search import SearchConfig, SearchStatus, generate_counterfactual
from .serialize import dumps_canonical, probability_display, result_to_jsonable

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIVERGED = 2
EXIT_NOT_FLIPPED = 3
EXIT_USAGE = 64

_STATUS_ORDER = (
    SearchStatus.FLIPPED,
    SearchStatus.LOCAL_OPTIMUM,
    SearchStatus.CONSTRAINTS_EXHAUSTED,
    SearchStatus.MAX_ITERATIONS,
)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract wants 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(message: str, code: int = EXIT_ERROR) -> int:
    print(f"binflip: error: {message}", file=sys.stderr)
    return code


def _split_names(raw: str | None) -> list[str]:
    if not raw:
        return []
    return [name.strip() for name in raw.split(",") if name.strip()]


def _load_predictor(args, dataset: Dataset):
    """Model file or external command; validates schema against the dataset."""
    if getattr(args, "external_cmd", None):
        return ExternalPredictor(args.external_cmd)
    model = load_model(args.model)
    if len(model.weights) != dataset.n_features:
        raise DatasetError(
            f"model has {len(model.weights)} features, data has {dataset.n_features}"
        )
    if model.feature_names and tuple(model.feature_names) != dataset.feature_names:
        raise DatasetError("model feature names do not match the data header")
    return model


def _resolve_locks(names: list[str], dataset: Dataset) -> frozenset[int]:
    indices = set()
    for name in names:
        try:
            indices.add(dataset.feature_names.index(name))
        except ValueError:
            raise KeyError(name) from None
    return frozenset(indices)


def cmd_train(args) -> int:
    try:
        dataset = load_csv(args.data, target_column=args.target)
        model = train_logistic(
            dataset,
            l2_penalty=args.l2,
            epochs=args.epochs,
            learning_rate=args.lr,
            seed=args.seed,
        )
    except TrainingDivergedError as exc:
        return _fail(str(exc), EXIT_DIVERGED)
    except (DatasetError, OSError) as exc:
        return _fail(str(exc))
    save_model(model, args.out)
    m = model.train_metrics
    print(f"accuracy: {m.accuracy:.4f}")
    print(f"tp: {m.tp}  fp: {m.fp}  tn: {m.tn}  fn: {m.fn}")
    print(f"wrote model to {args.out}")
    return EXIT_OK


def _explain_one(args, dataset: Dataset, model) -> tuple[int, str]:
    stats = compute_feature_stats(dataset)
    grid = build_bins(stats, 10)

    if args.index is not None:
        if not 0 <= args.index < dataset.n_rows:
            raise DatasetError(f"row index {args.index} out of range for {dataset.n_rows} rows")
        values = dataset.rows[args.index]
        index = args.index
    else:
        values = np.array(args.values, dtype=float)
        if values.shape[0] != dataset.n_features:
            raise DatasetError(
                f"expected {dataset.n_features} values, got {values.shape[0]}"
            )
        index = -1

    locks = _resolve_locks(_split_names(args.lock), dataset)
    config = SearchConfig(w=args.w, l=args.l, locks=locks)
    result = generate_counterfactual(values, model, grid, config)

    if args.format == "json":
        body = result_to_jsonable(result, dataset.feature_names)
        body["instance_index"] = index
        body["locks"] = sorted(dataset.feature_names[i] for i in locks)
        body["w"] = config.w
        body["l"] = config.l
        text = dumps_canonical(body)
    else:
        lines = [
            f"original probability: {probability_display(result.original_probability)}",
            f"status: {result.status.value}",
            f"final probability: {probability_display(result.final_probability)}",
        ]
        for c in result.changes:
            name = dataset.feature_names[c.feature]
            lines.append(
                f"{name}: {c.original_value!r} → {c.final_value!r}"
                f" (bin {c.original_bin} → {c.final_bin})"
            )
        text = "\n".join(lines)

    code = EXIT_OK if result.status is SearchStatus.FLIPPED else EXIT_NOT_FLIPPED
    return code, text


def cmd_explain(args) -> int:
    predictor = None
    try:
        dataset = load_csv(args.data)
        predictor = _load_predictor(args, dataset)
        code, text = _explain_one(args, dataset, predictor)
    except KeyError as exc:
        return _fail(f"unknown lock feature: {exc.args[0]!r}", EXIT_USAGE)
    except (DatasetError, ModelFileError, ExternalPredictorError, OSError) as exc:
        return _fail(str(exc))
    finally:
        if isinstance(predictor, ExternalPredictor):
            predictor.close()
    print(text)
    return code


def cmd_batch(args) -> int:
    try:
        dataset = load_csv(args.data)
        model = _load_predictor(args, dataset)
        locks = _resolve_locks(_split_names(args.lock), dataset)
    except KeyError as exc:
        return _fail(f"unknown lock feature: {exc.args[0]!r}", EXIT_USAGE)
    except (DatasetError, ModelFileError, OSError) as exc:
        return _fail(str(exc))

    stats = compute_feature_stats(dataset)
    grid = build_bins(stats, 10)
    config = SearchConfig(w=args.w, l=args.l, locks=locks)

    counts = {status: 0 for status in _STATUS_ORDER}
    decile_total = [0] * 10
    decile_flipped = [0] * 10
    change_sizes = []
    try:
        for i in range(dataset.n_rows):
            result = generate_counterfactual(dataset.rows[i], model, grid, config)
            counts[result.status] += 1
            decile = min(int(result.original_probability * 10.0), 9)
            decile_total[decile] += 1
            if result.flipped:
                decile_flipped[decile] += 1
                change_sizes.append(len(result.changes))
    except ExternalPredictorError as exc:
        return _fail(str(exc))

    n = dataset.n_rows
    flipped = counts[SearchStatus.FLIPPED]
    report = {
        "n_rows": n,
        "statuses": {status.value: counts[status] for status in _STATUS_ORDER},
        "flipped_rate": flipped / n,
        "flipped_rate_by_decile": [
            decile_flipped[d] / decile_total[d] if decile_total[d] else 0.0
            for d in range(10)
        ],
        "mean_changes_flipped": (
            sum(change_sizes) / len(change_sizes) if change_sizes else 0.0
        ),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(report) + "\n")
    print(f"wrote report to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_session, create_app

    predictor = None
    try:
        dataset = load_csv(args.data)
        predictor = _load_predictor(args, dataset)
        session = build_session(
            dataset,
            predictor,
            w=args.w,
            l=args.l,
            initial_locks=_split_names(args.initial_locks),
        )
    except ValueError as exc:
        # covers bad initial locks and dataset/model validation
        if isinstance(exc, (DatasetError, ModelFileError)):
            return _fail(str(exc))
        return _fail(str(exc), EXIT_USAGE)
    except (ExternalPredictorError, OSError) as exc:
        return _fail(str(exc))

    # bind check up front so "port in use" is a clean exit 1, not a traceback
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError as exc:
        return _fail(f"cannot bind {args.host}:{args.port}: {exc}")
    finally:
        probe.close()

    app = create_app(session, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    if isinstance(predictor, ExternalPredictor):
        predictor.close()
    return EXIT_OK


def _add_model_source(parser: _Parser, external_allowed: bool = True) -> None:
    if external_allowed:
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument("--model", help="model JSON file")
        group.add_argument(
            "--external-cmd",
            help="command for an external predictor speaking line JSON on stdio",
        )
    else:
        parser.add_argument("--model", required=True, help="model JSON file")


def _add_search_flags(parser: _Parser) -> None:
    parser.add_argument("--w", type=int, default=5, help="max features changed (default 5)")
    parser.add_argument("--l", type=int, default=5, help="max bins moved per feature (default 5)")
    parser.add_argument("--lock", help="comma-separated feature names to hold fixed")


def build_parser() -> _Parser:
    parser = _Parser(prog="binflip", description="counterfactual explanations on bin grids")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_train = sub.add_parser("train", help="fit the built-in logistic model")
    p_train.add_argument("--data", required=True, help="CSV with a binary target column")
    p_train.add_argument("--target", help="target column name (default: last column)")
    p_train.add_argument("--out", required=True, help="where to write the model JSON")
    p_train.add_argument("--l2", type=float, default=DEFAULT_L2)
    p_train.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    p_train.add_argument("--lr", type=float, default=DEFAULT_LEARNING_RATE)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.set_defaults(func=cmd_train)

    p_explain = sub.add_parser("explain", help="explain one instance")
    p_explain.add_argument("--data", required=True)
    _add_model_source(p_explain)
    which = p_explain.add_mutually_exclusive_group(required=True)
    which.add_argument("--index", type=int, help="row index into the data")
    which.add_argument(
        "--values",
        type=lambda s: [float(tok) for tok in s.split(",")],
        help="comma-separated feature values (use --values=-1,2,... for leading minus)",
    )
    _add_search_flags(p_explain)
    p_explain.add_argument("--format", choices=("text", "json"), default="text")
    p_explain.set_defaults(func=cmd_explain)

    p_batch = sub.add_parser("batch", help="explain every row, write a coverage report")
    p_batch.add_argument("--data", required=True)
    _add_model_source(p_batch, external_allowed=False)
    p_batch.add_argument("--out", required=True, help="report JSON path")
    _add_search_flags(p_batch)
    p_batch.set_defaults(func=cmd_batch)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--data", required=True)
    _add_model_source(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8571)
    p_serve.add_argument("--w", type=int, default=5)
    p_serve.add_argument("--l", type=int, default=5)
    p_serve.add_argument(
        "--initial-locks", help="comma-separated feature names locked by default"
    )
    p_serve.add_argument("--ui-dir", help="directory of static UI assets to serve at /")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
