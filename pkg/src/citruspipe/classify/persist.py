"""Binary trained-model files.

Layout (all integers little-endian)::

    b"CMDL01"
    u8   kind tag            1=knn 2=naive_bayes 3=random_forest 4=logistic_regression
    u32  field count
    field*                   in the fixed per-kind order listed in FIELDS

    field  := u16 name length, UTF-8 name, u8 type, payload
    type 0 (int)     : i64
    type 1 (float)   : f64
    type 2 (array)   : u8 dtype code (0=f64, 1=i64), u8 ndim, ndim * u64 dims, raw bytes
    type 3 (absent)  : no payload
    type 4 (string)  : u32 length, UTF-8 bytes

The optional standardizer is stored as the two arrays ``std_means`` and
``std_stds`` (or two absent fields). A random forest stores every tree's five
node arrays concatenated, plus ``tree_sizes`` giving each tree's node count.
"""
from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError
from .forest import DecisionTree, RandomForestModel
from .knn import KnnModel
from .logreg import LogRegModel
from .naive_bayes import GaussianNbModel
from .standardize import Standardizer

MAGIC = b"CMDL01"
KIND_TAGS = {KnnModel: 1, GaussianNbModel: 2, RandomForestModel: 3, LogRegModel: 4}
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<i8")}

FIELDS = {
    1: ("k", "n_classes", "train_features", "train_labels", "std_means", "std_stds"),
    2: ("n_classes", "epsilon", "class_log_priors", "means", "variances", "std_means", "std_stds"),
    3: ("n_classes", "n_features", "max_features", "min_samples_split", "seed", "tree_sizes",
        "feature", "threshold", "left", "right", "value", "std_means", "std_stds"),
    4: ("l2", "l1", "n_epochs", "converged", "weights", "biases", "std_means", "std_stds"),
}


def _write_field(out: io.BytesIO, name: str, value) -> None:
    raw = name.encode("utf-8")
    out.write(struct.pack("<H", len(raw)) + raw)
    if value is None:
        out.write(b"\x03")
    elif isinstance(value, np.ndarray):
        if np.issubdtype(value.dtype, np.floating):
            code, arr = 0, value.astype("<f8")
        else:
            code, arr = 1, value.astype("<i8")
        out.write(struct.pack("<BBB", 2, code, arr.ndim))
        out.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        out.write(np.ascontiguousarray(arr).tobytes())
    elif isinstance(value, (bool, int, np.integer)):
        out.write(struct.pack("<Bq", 0, int(value)))
    elif isinstance(value, (float, np.floating)):
        out.write(struct.pack("<Bd", 1, float(value)))
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        out.write(struct.pack("<BI", 4, len(raw)) + raw)
    else:
        raise TypeError(f"cannot serialize field {name!r} of type {type(value).__name__}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError("model file is truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def field(self):
        (n,) = self.unpack("<H")
        name = self.take(n).decode("utf-8")
        (kind,) = self.unpack("<B")
        if kind == 0:
            return name, self.unpack("<q")[0]
        if kind == 1:
            return name, self.unpack("<d")[0]
        if kind == 2:
            code, ndim = self.unpack("<BB")
            if code not in _DTYPES:
                raise FormatError(f"unknown array dtype code {code}")
            shape = self.unpack(f"<{ndim}Q")
            dtype = _DTYPES[code]
            count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
            arr = np.frombuffer(self.take(count * dtype.itemsize), dtype=dtype).reshape(shape)
            return name, arr.astype(dtype.newbyteorder("="))
        if kind == 3:
            return name, None
        if kind == 4:
            (n,) = self.unpack("<I")
            return name, self.take(n).decode("utf-8")
        raise FormatError(f"unknown field type {kind}")


def _model_fields(model) -> dict:
    s = model.standardizer
    std = {"std_means": s.means if s else None, "std_stds": s.stds if s else None}
    if isinstance(model, KnnModel):
        return {"k": model.k, "n_classes": model.n_classes, "train_features": model.train_features,
                "train_labels": model.train_labels, **std}
    if isinstance(model, GaussianNbModel):
        return {"n_classes": model.n_classes, "epsilon": model.epsilon, "class_log_priors": model.class_log_priors,
                "means": model.means, "variances": model.variances, **std}
    if isinstance(model, RandomForestModel):
        cat = lambda attr: np.concatenate([getattr(t, attr) for t in model.trees])  # noqa: E731
        return {"n_classes": model.n_classes, "n_features": model.n_features, "max_features": model.max_features,
                "min_samples_split": model.min_samples_split, "seed": model.seed,
                "tree_sizes": np.array([t.n_nodes for t in model.trees], dtype=np.int64),
                "feature": cat("feature"), "threshold": cat("threshold"), "left": cat("left"),
                "right": cat("right"), "value": cat("value"), **std}
    if isinstance(model, LogRegModel):
        return {"l2": model.l2, "l1": model.l1, "n_epochs": model.n_epochs, "converged": int(model.converged),
                "weights": model.weights, "biases": model.biases, **std}
    raise TypeError(f"not a trained model: {type(model).__name__}")


def model_to_bytes(model) -> bytes:
    tag = KIND_TAGS.get(type(model))
    if tag is None:
        raise TypeError(f"not a trained model: {type(model).__name__}")
    fields = _model_fields(model)
    out = io.BytesIO()
    out.write(MAGIC + struct.pack("<BI", tag, len(FIELDS[tag])))
    for name in FIELDS[tag]:
        _write_field(out, name, fields[name])
    return out.getvalue()


def model_from_bytes(data: bytes):
    if data[: len(MAGIC)] != MAGIC:
        raise FormatError("not a CMDL01 model file (bad magic)")
    r = _Reader(data)
    r.pos = len(MAGIC)
    tag, count = r.unpack("<BI")
    if tag not in FIELDS:
        raise FormatError(f"unknown model kind tag {tag}")
    if count != len(FIELDS[tag]):
        raise FormatError(f"expected {len(FIELDS[tag])} fields for kind {tag}, found {count}")
    f = {}
    for expected in FIELDS[tag]:
        name, value = r.field()
        if name != expected:
            raise FormatError(f"expected field {expected!r}, found {name!r}")
        f[name] = value
    if r.pos != len(data):
        raise FormatError("trailing bytes after model")

    std = Standardizer(f["std_means"], f["std_stds"]) if f["std_means"] is not None else None
    if tag == 1:
        return KnnModel(int(f["k"]), f["train_features"], f["train_labels"], int(f["n_classes"]), std)
    if tag == 2:
        return GaussianNbModel(f["class_log_priors"], f["means"], f["variances"], float(f["epsilon"]), std)
    if tag == 3:
        trees = []
        start = 0
        for size in f["tree_sizes"]:
            sl = slice(start, start + int(size))
            trees.append(DecisionTree(f["feature"][sl], f["threshold"][sl], f["left"][sl], f["right"][sl], f["value"][sl]))
            start += int(size)
        if start != len(f["feature"]):
            raise FormatError("tree sizes do not match node arrays")
        return RandomForestModel(tuple(trees), int(f["n_classes"]), int(f["n_features"]), int(f["max_features"]),
                                 int(f["min_samples_split"]), int(f["seed"]), std)
    return LogRegModel(f["weights"], f["biases"], float(f["l2"]), float(f["l1"]), std, int(f["n_epochs"]), bool(f["converged"]))


def save_model(model, path: str | Path) -> None:
    Path(path).write_bytes(model_to_bytes(model))


def load_model(path: str | Path):
    return model_from_bytes(Path(path).read_bytes())
