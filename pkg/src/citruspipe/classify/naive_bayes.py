"""Gaussian naive Bayes, evaluated in log space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..errors import MissingClass
from ._common import argmax_lowest, check_queries, check_training_data
from .standardize import Standardizer, standardize_fit

VAR_SMOOTHING = 1e-9


@dataclass(frozen=True)
class GaussianNbModel:
    class_log_priors: np.ndarray  # K
    means: np.ndarray  # K x D
    variances: np.ndarray  # K x D, smoothed
    epsilon: float
    standardizer: Standardizer | None = None

    @property
    def n_classes(self) -> int:
        return len(self.class_log_priors)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def predict(self, Q) -> np.ndarray:
        return nb_predict(self, Q)


def nb_fit(X, y, n_classes: int | None = None, standardize: bool = False) -> GaussianNbModel:
    """Per-class priors, means and biased variances.

    Every variance is inflated by ``1e-9 * max(pooled per-feature variance)``;
    when all features are constant the absolute floor ``1e-9`` is used so the
    smoothed variances stay strictly positive.
    """
    X, y, n_classes = check_training_data(X, y, n_classes)
    scaler = None
    if standardize:
        scaler = standardize_fit(X)
        X = scaler.apply(X)
    counts = np.bincount(y, minlength=n_classes)
    if np.any(counts == 0):
        missing = [int(c) for c in np.flatnonzero(counts == 0)]
        raise MissingClass(f"classes {missing} have no training rows")

    epsilon = VAR_SMOOTHING * float(X.var(axis=0).max())
    if epsilon <= 0.0:
        epsilon = VAR_SMOOTHING
    means = np.empty((n_classes, X.shape[1]))
    variances = np.empty_like(means)
    for c in range(n_classes):
        rows = X[y == c]
        means[c] = rows.mean(axis=0)
        variances[c] = ((rows - means[c]) ** 2).mean(axis=0) + epsilon
    log_priors = np.log(counts / counts.sum())
    return GaussianNbModel(log_priors, means, variances, epsilon, scaler)


def nb_joint_log_likelihood(model: GaussianNbModel, Q) -> np.ndarray:
    """``log P(c) + sum_d log N(q_d; mu_cd, var_cd)`` for every query and class (M x K)."""
    Q = check_queries(Q, model.dim)
    if model.standardizer is not None:
        Q = model.standardizer.apply(Q)
    out = np.empty((Q.shape[0], model.n_classes))
    for c in range(model.n_classes):
        var = model.variances[c]
        norm = -0.5 * np.sum(np.log(2.0 * np.pi * var))
        out[:, c] = model.class_log_priors[c] + norm - 0.5 * np.sum((Q - model.means[c]) ** 2 / var, axis=1)
    return out


def nb_log_posteriors(model: GaussianNbModel, Q) -> np.ndarray:
    jll = nb_joint_log_likelihood(model, Q)
    return jll - logsumexp(jll, axis=1, keepdims=True)


def nb_predict(model: GaussianNbModel, Q) -> np.ndarray:
    return argmax_lowest(nb_joint_log_likelihood(model, Q))
