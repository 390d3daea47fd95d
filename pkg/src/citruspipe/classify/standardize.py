from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STD_FLOOR = 1e-12


@dataclass(frozen=True)
class Standardizer:
    means: np.ndarray
    stds: np.ndarray

    def apply(self, Q: np.ndarray) -> np.ndarray:
        return standardize_apply(self, Q)


def standardize_fit(X: np.ndarray) -> Standardizer:
    """Per-feature z-score statistics of the training matrix.

    Constant columns get their exact value as mean so they transform to 0.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("standardize_fit needs a non-empty 2-D matrix")
    means = X.mean(axis=0)
    constant = np.all(X == X[0], axis=0)
    means[constant] = X[0, constant]
    stds = X.std(axis=0)
    stds[constant] = 0.0
    return Standardizer(means, np.maximum(stds, STD_FLOOR))


def standardize_apply(s: Standardizer, Q: np.ndarray) -> np.ndarray:
    return (np.asarray(Q, dtype=np.float64) - s.means) / s.stds
