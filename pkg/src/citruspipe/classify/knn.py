"""k-nearest-neighbours with fully determined tie-breaking.

Neighbour selection: ascending squared Euclidean distance, equal distances
resolved by lower training index. Voting: most neighbours wins; equal counts
go to the class whose neighbours have the smaller summed distance, then to
the lower class index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import InvalidHyperparameter
from ._common import check_queries, check_training_data, positive_int
from .standardize import Standardizer, standardize_fit

DEFAULT_K = 5
# bytes of distance matrix per chunk of queries
_CHUNK_BYTES = 64 << 20


@dataclass(frozen=True)
class KnnModel:
    k: int
    train_features: np.ndarray
    train_labels: np.ndarray
    n_classes: int
    standardizer: Standardizer | None = None

    @property
    def dim(self) -> int:
        return self.train_features.shape[1]

    def predict(self, Q) -> np.ndarray:
        return knn_predict(self, Q)


def knn_fit(X, y, k: int = DEFAULT_K, n_classes: int | None = None, standardize: bool = False) -> KnnModel:
    X, y, n_classes = check_training_data(X, y, n_classes)
    k = positive_int("k", k)
    if k > X.shape[0]:
        raise InvalidHyperparameter(f"k={k} exceeds the {X.shape[0]} training rows")
    scaler = None
    if standardize:
        scaler = standardize_fit(X)
        X = scaler.apply(X)
    return KnnModel(k, X, y, n_classes, scaler)


def squared_distances(Q: np.ndarray, X: np.ndarray) -> np.ndarray:
    return cdist(Q, X, metric="sqeuclidean")


def knn_neighbors(model: KnnModel, Q) -> tuple[np.ndarray, np.ndarray]:
    """Indices (M x k) and squared distances of each query's neighbours."""
    Q = check_queries(Q, model.dim)
    if model.standardizer is not None:
        Q = model.standardizer.apply(Q)
    n = model.train_features.shape[0]
    step = max(1, _CHUNK_BYTES // (8 * n))
    idx = np.empty((Q.shape[0], model.k), dtype=np.int64)
    dist = np.empty((Q.shape[0], model.k))
    for start in range(0, Q.shape[0], step):
        d = squared_distances(Q[start : start + step], model.train_features)
        order = np.argsort(d, axis=1, kind="stable")[:, : model.k]
        idx[start : start + step] = order
        dist[start : start + step] = np.take_along_axis(d, order, axis=1)
    return idx, dist


def knn_predict(model: KnnModel, Q) -> np.ndarray:
    idx, dist = knn_neighbors(model, Q)
    labels = model.train_labels[idx]
    out = np.empty(len(idx), dtype=np.int64)
    for i in range(len(idx)):
        counts = np.bincount(labels[i], minlength=model.n_classes)
        sums = np.bincount(labels[i], weights=dist[i], minlength=model.n_classes)
        # lexsort: last key is primary
        out[i] = np.lexsort((np.arange(model.n_classes), sums, -counts))[0]
    return out
