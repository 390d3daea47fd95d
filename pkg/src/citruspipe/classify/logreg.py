"""Multinomial logistic regression trained by full-batch gradient descent.

Objective (biases unpenalized)::

    mean_i CE(softmax(W x_i + b), y_i) + l2/2 * ||W||^2 + l1 * ||W||_1

The smooth part takes a gradient step; when ``l1 > 0`` a soft-threshold of
width ``lr * l1`` follows. Training stops once the step's gradient mapping
has infinity-norm below ``tol`` (for ``l1 == 0`` that is the plain gradient)
or after ``max_epochs`` steps.

A step that would raise the objective is retried with the step size halved.
With a well-conditioned problem this never fires and the run is plain
fixed-step descent; it keeps the objective monotone on badly conditioned
high-dimensional features.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_softmax, softmax

from ..errors import InvalidHyperparameter, TrainingDiverged
from ._common import argmax_lowest, check_queries, check_training_data, nonnegative, positive_int
from .standardize import Standardizer, standardize_fit

_MAX_HALVINGS = 60


@dataclass(frozen=True)
class LogRegModel:
    weights: np.ndarray  # K x D
    biases: np.ndarray  # K
    l2: float
    l1: float
    standardizer: Standardizer | None = None
    n_epochs: int = 0
    converged: bool = False
    loss_history: tuple[float, ...] = field(default=(), compare=False)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def predict(self, Q) -> np.ndarray:
        return logreg_predict(self, Q)


def soft_threshold(W: np.ndarray, width: float) -> np.ndarray:
    return np.sign(W) * np.maximum(np.abs(W) - width, 0.0)


def logreg_objective(W, b, X, y, l2: float = 0.0, l1: float = 0.0) -> float:
    logp = log_softmax(X @ W.T + b, axis=1)
    ce = -logp[np.arange(len(y)), y].mean()
    return float(ce + 0.5 * l2 * np.sum(W * W) + l1 * np.sum(np.abs(W)))


def logreg_loss_grad(W, b, X, y, l2: float = 0.0) -> tuple[float, np.ndarray, np.ndarray]:
    """Smooth objective (cross-entropy + L2) and its gradient w.r.t. ``W`` and ``b``."""
    n = X.shape[0]
    logits = X @ W.T + b
    logp = log_softmax(logits, axis=1)
    loss = -logp[np.arange(n), y].mean() + 0.5 * l2 * np.sum(W * W)
    resid = np.exp(logp)
    resid[np.arange(n), y] -= 1.0
    resid /= n
    return float(loss), resid.T @ X + l2 * W, resid.sum(axis=0)


def logreg_fit(
    X,
    y,
    l2: float = 1e-3,
    l1: float = 0.0,
    lr: float = 0.1,
    max_epochs: int = 500,
    tol: float = 1e-5,
    standardize: bool = True,
    n_classes: int | None = None,
) -> LogRegModel:
    X, y, n_classes = check_training_data(X, y, n_classes)
    l2 = nonnegative("l2", l2)
    l1 = nonnegative("l1", l1)
    tol = nonnegative("tol", tol)
    lr = nonnegative("lr", lr)
    if lr == 0.0:
        raise InvalidHyperparameter("lr must be > 0")
    max_epochs = positive_int("max_epochs", max_epochs)
    if X.shape[0] < n_classes:
        raise InvalidHyperparameter(f"need at least {n_classes} rows for {n_classes} classes")

    scaler = None
    if standardize:
        scaler = standardize_fit(X)
        X = scaler.apply(X)

    W = np.zeros((n_classes, X.shape[1]))
    b = np.zeros(n_classes)

    with np.errstate(over="ignore", invalid="ignore"):
        return _descend(X, y, W, b, l2, l1, lr, max_epochs, tol, scaler)


def _descend(X, y, W, b, l2, l1, lr, max_epochs, tol, scaler) -> LogRegModel:
    penalty = lambda W_: l1 * np.sum(np.abs(W_))  # noqa: E731
    loss, gW, gb = logreg_loss_grad(W, b, X, y, l2)
    objective = loss + penalty(W)
    if not np.isfinite(objective):
        raise TrainingDiverged("initial loss is not finite")
    history = [objective]
    converged = False
    epochs = 0
    while epochs < max_epochs:
        W_next = soft_threshold(W - lr * gW, lr * l1) if l1 else W - lr * gW
        mapping = max(np.max(np.abs((W - W_next) / lr)), np.max(np.abs(gb)))
        if mapping < tol:
            converged = True
            break

        step = lr
        for _ in range(_MAX_HALVINGS):
            W_try = soft_threshold(W - step * gW, step * l1) if l1 else W - step * gW
            b_try = b - step * gb
            loss_try, gW_try, gb_try = logreg_loss_grad(W_try, b_try, X, y, l2)
            obj_try = loss_try + penalty(W_try)
            if not np.isfinite(obj_try):
                if step == lr:
                    raise TrainingDiverged(f"loss became non-finite at epoch {epochs + 1}")
            elif obj_try <= objective:
                break
            step /= 2.0
        else:
            break  # no decrease possible at any step size: numerically stationary
        W, b, gW, gb, objective = W_try, b_try, gW_try, gb_try, obj_try
        history.append(objective)
        epochs += 1

    return LogRegModel(W, b, l2, l1, scaler, epochs, converged, tuple(history))


def logreg_predict_proba(model: LogRegModel, Q) -> np.ndarray:
    Q = check_queries(Q, model.dim)
    if model.standardizer is not None:
        Q = model.standardizer.apply(Q)
    # scipy's softmax subtracts the row max
    return softmax(Q @ model.weights.T + model.biases, axis=1)


def logreg_predict(model: LogRegModel, Q) -> np.ndarray:
    return argmax_lowest(logreg_predict_proba(model, Q))
