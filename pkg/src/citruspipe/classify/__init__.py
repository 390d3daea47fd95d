"""From-scratch classifiers behind one fit/predict interface.

>>> model = fit("knn", X_train, y_train, k=5)
>>> y_pred = model.predict(X_test)
"""
from __future__ import annotations

import inspect

from ..errors import ConfigError
from .forest import DecisionTree, RandomForestModel, rf_fit, rf_predict, rf_tree_votes
from .knn import KnnModel, knn_fit, knn_neighbors, knn_predict
from .logreg import LogRegModel, logreg_fit, logreg_loss_grad, logreg_objective, logreg_predict, logreg_predict_proba
from .naive_bayes import GaussianNbModel, nb_fit, nb_joint_log_likelihood, nb_log_posteriors, nb_predict
from .persist import load_model, model_from_bytes, model_to_bytes, save_model
from .standardize import Standardizer, standardize_apply, standardize_fit

FITTERS = {
    "knn": knn_fit,
    "naive_bayes": nb_fit,
    "random_forest": rf_fit,
    "logistic_regression": logreg_fit,
}
CLASSIFIER_KINDS = tuple(FITTERS)


def fit(kind: str, X, y, n_classes: int | None = None, **params):
    try:
        fitter = FITTERS[kind]
    except KeyError:
        raise ConfigError(f"unknown classifier {kind!r}; expected one of {CLASSIFIER_KINDS}") from None
    unknown = set(params) - hyperparameters(kind)
    if unknown:
        raise ConfigError(f"unknown hyperparameters for {kind}: {sorted(unknown)}")
    return fitter(X, y, n_classes=n_classes, **params)


def hyperparameters(kind: str) -> set[str]:
    names = inspect.signature(FITTERS[kind]).parameters
    return set(names) - {"X", "y", "n_classes"}


def predict(model, Q):
    return model.predict(Q)


__all__ = [
    "CLASSIFIER_KINDS", "DecisionTree", "GaussianNbModel", "KnnModel", "LogRegModel", "RandomForestModel",
    "Standardizer", "fit", "hyperparameters", "knn_fit", "knn_neighbors", "knn_predict", "load_model", "logreg_fit",
    "logreg_loss_grad", "logreg_objective", "logreg_predict", "logreg_predict_proba", "model_from_bytes",
    "model_to_bytes", "nb_fit", "nb_joint_log_likelihood", "nb_log_posteriors", "nb_predict", "predict",
    "rf_fit", "rf_predict", "rf_tree_votes", "save_model", "standardize_apply", "standardize_fit",
]
