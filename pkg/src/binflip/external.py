"""Bridge to an out-of-process predictor over line-delimited JSON on stdio.

The child process reads one request object per line from stdin and must
answer each with exactly one response line on stdout:

    -> {"id": 7, "instances": [[1.0, 2.0], [3.0, 4.0]]}
    <- {"id": 7, "probabilities": [0.25, 0.75]}

One request is in flight at a time. Any protocol violation raises a distinct
error kind; a wrong answer is never patched up into numbers.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from typing import Sequence

import numpy as np

__all__ = [
    "ExternalPredictor",
    "ExternalPredictorError",
    "PredictorTimeoutError",
    "MalformedResponseError",
    "ResponseLengthError",
    "ProbabilityRangeError",
]


class ExternalPredictorError(RuntimeError):
    """Base class for external-predictor protocol failures."""


class PredictorTimeoutError(ExternalPredictorError):
    """The child did not answer within the configured timeout."""


class MalformedResponseError(ExternalPredictorError):
    """The child's reply was not a valid response object for this request."""


class ResponseLengthError(ExternalPredictorError):
    """The probabilities array does not match the number of instances sent."""


class ProbabilityRangeError(ExternalPredictorError):
    """A returned probability is outside [0, 1] or not finite."""


class ExternalPredictor:
    """Runs ``command`` as a child process and proxies predict_proba to it.

    Thread-safe: calls are serialized on an internal lock. On timeout the
    child is killed, since a late reply would desynchronize every request
    after it.
    """

    def __init__(self, command: Sequence[str] | str, timeout_ms: int = 10_000):
        if isinstance(command, str):
            command = shlex.split(command)
        if timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        self.command = tuple(command)
        self.timeout_ms = timeout_ms
        self._lock = threading.Lock()
        self._next_id = 0
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("expected a non-empty batch of shape (N, F)")
        with self._lock:
            request_id = self._next_id
            self._next_id += 1
            payload = json.dumps(
                {"id": request_id, "instances": X.tolist()}, ensure_ascii=False
            )
            try:
                self._proc.stdin.write(payload + "\n")
                self._proc.stdin.flush()
            except (OSError, ValueError) as exc:
                # ValueError: writing after close() marks the pipe unusable
                raise MalformedResponseError(
                    f"predictor process is not accepting requests: {exc}"
                ) from None
            try:
                line = self._lines.get(timeout=self.timeout_ms / 1000.0)
            except queue.Empty:
                self._proc.kill()
                raise PredictorTimeoutError(
                    f"no response within {self.timeout_ms} ms"
                ) from None
            if line is None:
                raise MalformedResponseError("predictor process exited before replying")
        return self._parse_response(line, request_id, X.shape[0])

    @staticmethod
    def _parse_response(line: str, request_id: int, n_sent: int) -> np.ndarray:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedResponseError(f"response is not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise MalformedResponseError("response is not a JSON object")
        if obj.get("id") != request_id:
            raise MalformedResponseError(
                f"response id {obj.get('id')!r} does not echo request id {request_id}"
            )
        probs = obj.get("probabilities")
        if not isinstance(probs, list):
            raise MalformedResponseError("response lacks a probabilities array")
        if len(probs) != n_sent:
            raise ResponseLengthError(
                f"sent {n_sent} instances, received {len(probs)} probabilities"
            )
        try:
            out = np.array([float(p) for p in probs], dtype=float)
        except (TypeError, ValueError):
            raise MalformedResponseError("probabilities contain non-numeric entries") from None
        if not np.isfinite(out).all() or (out < 0).any() or (out > 1).any():
            raise ProbabilityRangeError(f"probabilities outside [0, 1]: {probs}")
        return out

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self) -> "ExternalPredictor":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
