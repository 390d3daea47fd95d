from __future__ import annotations

import numpy as np

from ..errors import InvalidHyperparameter, InvalidLabel, ShapeMismatch


def check_training_data(X, y, n_classes: int | None = None) -> tuple[np.ndarray, np.ndarray, int]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise ShapeMismatch(f"feature matrix must be 2-D, got shape {X.shape}")
    if y.ndim != 1 or len(y) != X.shape[0]:
        raise ShapeMismatch(f"{len(y)} labels for {X.shape[0]} rows")
    if X.shape[0] == 0:
        raise ShapeMismatch("empty training set")
    if not np.issubdtype(y.dtype, np.integer):
        if not np.all(np.mod(y, 1) == 0):
            raise InvalidLabel("labels must be integers")
    y = y.astype(np.int64)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if y.min() < 0 or y.max() >= n_classes:
        raise InvalidLabel(f"labels must lie in [0, {n_classes})")
    if not np.all(np.isfinite(X)):
        raise ShapeMismatch("training features must be finite")
    return X, y, int(n_classes)


def check_queries(Q, dim: int) -> np.ndarray:
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim == 1 and dim == Q.shape[0]:
        Q = Q[None, :]
    if Q.ndim != 2 or Q.shape[1] != dim:
        raise ShapeMismatch(f"queries have shape {Q.shape}, model expects {dim} features")
    return Q


def positive_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise InvalidHyperparameter(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def nonnegative(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise InvalidHyperparameter(f"{name} must be finite and >= 0, got {value!r}")
    return value


def argmax_lowest(scores: np.ndarray) -> np.ndarray:
    """Row-wise argmax; ``np.argmax`` already returns the first maximum."""
    return np.argmax(scores, axis=1).astype(np.int64)
