"""Image -> flat feature vector.

Two extractor families:

* ONNX graphs of pretrained CNN trunks (VGG16, VGG19, ResNet50) with their
  classification heads removed. A JSON manifest next to each model declares
  the input/output tensor names, the expected input normalization and channel
  order, and how the tapped activation is reduced to a row.
* ``baseline``: a weight-free colour histogram + grayscale thumbnail, so the
  whole pipeline can run without model files.

``onnxruntime`` is imported lazily; only the CNN path needs it.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ModelLoadError, ShapeMismatch

KINDS = ("vgg16", "vgg19", "resnet50", "baseline")
PREPROCESSING = ("mean_subtract_caffe", "unit_scale_torch", "none")
CHANNEL_ORDERS = ("rgb", "bgr")
TAPS = ("flatten_last_conv", "global_average_pool")

BASELINE_DIM = 576
BASELINE_VERSION = "hist8x8x8+thumb8x8/v1"

# RGB order, 0-255 units
CAFFE_MEAN = np.array([123.68, 116.779, 103.939])
TORCH_MEAN = np.array([0.485, 0.456, 0.406])
TORCH_STD = np.array([0.229, 0.224, 0.225])

MANIFEST_KEYS = {"kind", "input_name", "output_name", "preprocessing", "channel_order_expected", "tap", "output_dim"}
OPTIONAL_MANIFEST_KEYS = {"pixel_range", "model_path"}


@dataclass(frozen=True)
class ExtractorSpec:
    kind: str
    model_path: Path | None = None
    preprocessing: str = "none"
    channel_order_expected: str = "rgb"
    tap: str = "flatten_last_conv"
    output_dim: int = BASELINE_DIM
    input_name: str | None = None
    output_name: str | None = None
    # Pixel scale the model was trained on; caffe-lineage Keras graphs use 255.
    pixel_range: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown extractor kind {self.kind!r}")
        if self.preprocessing not in PREPROCESSING:
            raise ConfigError(f"unknown preprocessing {self.preprocessing!r}")
        if self.channel_order_expected not in CHANNEL_ORDERS:
            raise ConfigError(f"unknown channel order {self.channel_order_expected!r}")
        if self.tap not in TAPS:
            raise ConfigError(f"unknown tap {self.tap!r}")
        if self.kind == "baseline":
            if self.model_path is not None or self.output_dim != BASELINE_DIM or self.preprocessing != "none":
                raise ConfigError("baseline extractor takes no model, output_dim 576 and preprocessing 'none'")
        else:
            if self.model_path is None:
                raise ConfigError(f"{self.kind} extractor needs a model_path")
            if not self.input_name or not self.output_name:
                raise ConfigError(f"{self.kind} extractor needs input_name and output_name")
        if not (isinstance(self.output_dim, int) and self.output_dim > 0):
            raise ConfigError("output_dim must be a positive integer")
        if self.pixel_range <= 0:
            raise ConfigError("pixel_range must be positive")

    @classmethod
    def baseline(cls) -> "ExtractorSpec":
        return cls(kind="baseline")

    @classmethod
    def from_manifest(cls, manifest_path: str | Path, model_path: str | Path | None = None) -> "ExtractorSpec":
        """Read a model manifest; ``model_path`` defaults to the manifest's
        ``model_path`` entry, else the manifest path with an ``.onnx`` suffix."""
        manifest_path = Path(manifest_path)
        try:
            data = json.loads(manifest_path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ModelLoadError(f"manifest not found: {manifest_path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
        missing = MANIFEST_KEYS - data.keys()
        unknown = data.keys() - MANIFEST_KEYS - OPTIONAL_MANIFEST_KEYS
        if missing or unknown:
            raise ConfigError(f"manifest {manifest_path}: missing {sorted(missing)}, unknown {sorted(unknown)}")
        if model_path is None:
            if "model_path" in data:
                model_path = manifest_path.parent / data["model_path"]
            else:
                model_path = manifest_path.with_suffix(".onnx")
        return cls(
            kind=data["kind"],
            model_path=Path(model_path),
            preprocessing=data["preprocessing"],
            channel_order_expected=data["channel_order_expected"],
            tap=data["tap"],
            output_dim=int(data["output_dim"]),
            input_name=data["input_name"],
            output_name=data["output_name"],
            pixel_range=float(data.get("pixel_range", 1.0)),
        )

    def manifest(self) -> dict:
        out = {
            "kind": self.kind,
            "input_name": self.input_name,
            "output_name": self.output_name,
            "preprocessing": self.preprocessing,
            "channel_order_expected": self.channel_order_expected,
            "tap": self.tap,
            "output_dim": self.output_dim,
        }
        if self.pixel_range != 1.0:
            out["pixel_range"] = self.pixel_range
        return out


@dataclass(frozen=True)
class FeatureMatrix:
    """``values`` is float32 ``N x D``; ``labels`` int64 in ``[0, n_classes)``."""

    values: np.ndarray
    labels: np.ndarray
    extractor_id: str
    n_classes: int
    class_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ShapeMismatch("feature values must be 2-D")
        if len(self.labels) != self.values.shape[0]:
            raise ShapeMismatch(f"{len(self.labels)} labels for {self.values.shape[0]} rows")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ShapeMismatch("label outside [0, n_classes)")
        if not np.all(np.isfinite(self.values)):
            raise ShapeMismatch("feature values must be finite")

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (
            self.extractor_id == other.extractor_id
            and self.n_classes == other.n_classes
            and self.values.dtype == other.values.dtype
            and self.values.shape == other.values.shape
            and self.values.tobytes() == other.values.tobytes()
            and np.array_equal(self.labels, other.labels)
        )


def file_digest(path: str | Path, length: int = 16) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:length]


def extractor_id(spec: ExtractorSpec) -> str:
    if spec.kind == "baseline":
        return f"baseline:none:{hashlib.sha256(BASELINE_VERSION.encode()).hexdigest()[:16]}"
    try:
        digest = file_digest(spec.model_path)
    except OSError as exc:
        raise ModelLoadError(f"cannot read model file {spec.model_path}: {exc}") from exc
    preproc = spec.preprocessing if spec.pixel_range == 1.0 else f"{spec.preprocessing}@{spec.pixel_range!r}"
    return f"{spec.kind}:{spec.tap}:{preproc}:{spec.channel_order_expected}:{digest}"


def preprocess_for_model(img: np.ndarray, spec: ExtractorSpec) -> np.ndarray:
    """Canonical ``224 x 224 x 3`` RGB image -> channels-first model input (float32)."""
    x = np.asarray(img, dtype=np.float64)
    if spec.preprocessing == "mean_subtract_caffe":
        x = x * spec.pixel_range - CAFFE_MEAN * (spec.pixel_range / 255.0)
    elif spec.preprocessing == "unit_scale_torch":
        x = (x - TORCH_MEAN) / TORCH_STD
    if spec.channel_order_expected == "bgr":
        x = x[:, :, ::-1]
    return np.ascontiguousarray(x.transpose(2, 0, 1), dtype=np.float32)


def baseline_extract(img: np.ndarray) -> np.ndarray:
    """512-bin joint RGB histogram (normalized) followed by an 8x8 gray thumbnail."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    bins = np.minimum(np.floor(img * 8).astype(np.int64), 7)
    flat = bins[..., 0] * 64 + bins[..., 1] * 8 + bins[..., 2]
    hist = np.bincount(flat.ravel(), minlength=512).astype(np.float64) / (h * w)

    gray = img.mean(axis=2)
    ys = [(h * i) // 8 for i in range(9)]
    xs = [(w * j) // 8 for j in range(9)]
    thumb = np.array(
        [[gray[ys[i]:ys[i + 1], xs[j]:xs[j + 1]].mean() for j in range(8)] for i in range(8)]
    )
    return np.concatenate([hist, thumb.ravel()])


class OnnxExtractor:
    """A loaded ONNX session bound to one :class:`ExtractorSpec`."""

    def __init__(self, spec: ExtractorSpec, threads: int | None = None):
        if spec.kind == "baseline":
            raise ConfigError("OnnxExtractor needs a CNN extractor spec")
        try:
            import onnxruntime as ort
        except ImportError as exc:  # pragma: no cover - depends on environment
            raise ModelLoadError("onnxruntime is required for CNN extractors (pip install citruspipe[onnx])") from exc
        self.spec = spec
        if not Path(spec.model_path).is_file():
            raise ModelLoadError(f"model file not found: {spec.model_path}")
        opts = ort.SessionOptions()
        if threads:
            opts.intra_op_num_threads = threads
        try:
            self.session = ort.InferenceSession(str(spec.model_path), opts, providers=["CPUExecutionProvider"])
        except Exception as exc:
            raise ModelLoadError(f"cannot load {spec.model_path}: {exc}") from exc
        inputs = {i.name for i in self.session.get_inputs()}
        outputs = {o.name for o in self.session.get_outputs()}
        if spec.input_name not in inputs:
            raise ModelLoadError(f"model has no input {spec.input_name!r} (has {sorted(inputs)})")
        if spec.output_name not in outputs:
            raise ModelLoadError(f"model does not expose tensor {spec.output_name!r} (has {sorted(outputs)})")

    def run(self, batch: np.ndarray) -> np.ndarray:
        """``B x 3 x 224 x 224`` float32 -> ``B x D`` float32 rows."""
        (act,) = self.session.run([self.spec.output_name], {self.spec.input_name: batch})
        act = np.asarray(act, dtype=np.float32)
        if self.spec.tap == "global_average_pool":
            if act.ndim != 4:
                raise ShapeMismatch(f"global_average_pool needs a 4-D activation, got shape {act.shape}")
            act = act.mean(axis=(2, 3), dtype=np.float64).astype(np.float32)
        rows = act.reshape(act.shape[0], -1)
        if rows.shape[1] != self.spec.output_dim:
            raise ShapeMismatch(
                f"tapped tensor {self.spec.output_name!r} has {rows.shape[1]} elements per image, "
                f"manifest declares {self.spec.output_dim}"
            )
        return rows


def extract_features(
    images: Sequence[np.ndarray] | Iterable[np.ndarray],
    labels: Sequence[int],
    spec: ExtractorSpec,
    n_classes: int | None = None,
    batch_size: int = 16,
    extractor: OnnxExtractor | None = None,
) -> FeatureMatrix:
    """Run every image through the extractor; row ``i`` belongs to image ``i``.

    ``images`` may be a lazy iterable (e.g. a generator of decoded files) so
    large datasets are never held in memory all at once.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if n_classes is None:
        n_classes = int(labels.max()) + 1 if len(labels) else 1
    fid = extractor_id(spec)
    rows: list[np.ndarray] = []
    if spec.kind == "baseline":
        for img in images:
            rows.append(baseline_extract(img).astype(np.float32)[None, :])
    else:
        extractor = extractor or OnnxExtractor(spec)
        pending: list[np.ndarray] = []
        for img in images:
            pending.append(preprocess_for_model(img, spec))
            if len(pending) == batch_size:
                rows.append(extractor.run(np.stack(pending)))
                pending = []
        if pending:
            rows.append(extractor.run(np.stack(pending)))
    values = np.concatenate(rows) if rows else np.zeros((0, spec.output_dim), dtype=np.float32)
    if values.shape[0] != len(labels):
        raise ShapeMismatch(f"{values.shape[0]} images for {len(labels)} labels")
    return FeatureMatrix(values, labels, fid, n_classes)
