"""Confusion matrices and macro-averaged classification metrics.

Rows of a confusion matrix are actual classes, columns predicted classes.
Per-class precision, recall and F1 treat 0/0 as 0; the macro value of each
metric is the unweighted mean over classes. Macro F1 is the mean of the
per-class F1 scores, which in general differs from the harmonic mean of macro
precision and macro recall.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInput, InvalidLabel, ShapeMismatch

AVERAGING = "macro"


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # K x K int64
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        c = self.counts
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ShapeMismatch(f"confusion counts must be square, got {c.shape}")
        if np.any(c < 0):
            raise ValueError("confusion counts must be nonnegative")
        if self.class_names and len(self.class_names) != c.shape[0]:
            raise ShapeMismatch("one class name per row required")

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_rows(cls, rows, class_names=()) -> "ConfusionMatrix":
        return cls(np.asarray(rows, dtype=np.int64), tuple(class_names))


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray

    def to_dict(self) -> dict:
        r6 = lambda v: round(float(v), 6)  # noqa: E731
        return {
            "class_names": list(self.confusion.class_names),
            "confusion": self.confusion.counts.tolist(),
            "averaging": AVERAGING,
            "accuracy": r6(self.accuracy),
            "recall": r6(self.macro_recall),
            "precision": r6(self.macro_precision),
            "f1": r6(self.macro_f1),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")


def confusion(y_true, y_pred, n_classes: int, class_names=()) -> ConfusionMatrix:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ShapeMismatch(f"y_true {y_true.shape} and y_pred {y_pred.shape} must be equal-length vectors")
    for name, y in (("y_true", y_true), ("y_pred", y_pred)):
        if len(y) and (y.min() < 0 or y.max() >= n_classes):
            raise InvalidLabel(f"{name} has labels outside [0, {n_classes})")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true.astype(np.int64), y_pred.astype(np.int64)), 1)
    return ConfusionMatrix(counts, tuple(class_names))


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(len(num), dtype=np.float64)
    nz = den != 0
    out[nz] = num[nz] / den[nz]
    return out


def evaluate(cm: ConfusionMatrix) -> EvalReport:
    c = cm.counts
    if c.size == 0 or cm.total == 0:
        raise DegenerateInput("cannot evaluate an empty confusion matrix")
    diag = np.diag(c).astype(np.float64)
    precision = _safe_ratio(diag, c.sum(axis=0).astype(np.float64))
    recall = _safe_ratio(diag, c.sum(axis=1).astype(np.float64))
    f1 = _safe_ratio(2 * precision * recall, precision + recall)
    return EvalReport(
        confusion=cm,
        accuracy=float(np.trace(c)) / cm.total,
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        precision=precision,
        recall=recall,
        f1=f1,
    )


def micro_recall(cm: ConfusionMatrix) -> float:
    """Pooled TP / (TP + FN); equals accuracy for single-label multiclass."""
    c = cm.counts
    tp = np.trace(c)
    fn = c.sum() - tp
    return float(tp) / float(tp + fn)
