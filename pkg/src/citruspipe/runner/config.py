"""Experiment configuration (JSON).

Schema, with defaults::

    {
      "dataset_root": "data/lemon",              # required
      "test_fraction": 0.2,
      "seed": 0,
      "extractors": ["baseline",                 # required, non-empty
                     {"manifest": "models/resnet50.json", "model": "models/resnet50.onnx"}],
      "classifiers": ["knn",                     # required, non-empty
                      {"kind": "logistic_regression", "params": {"l2": 0.001}}],
      "output_dir": "results",
      "cache_dir": null,                         # null disables the feature cache
      "save_models": false,
      "batch_size": 16
    }

Relative paths are resolved against the directory holding the config file.
Unknown keys anywhere in the document are rejected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..classify import CLASSIFIER_KINDS, hyperparameters
from ..errors import ConfigError
from ..featurex import ExtractorSpec

TOP_LEVEL_KEYS = {
    "dataset_root", "test_fraction", "seed", "extractors", "classifiers",
    "output_dir", "cache_dir", "save_models", "batch_size",
}


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def canonical(self) -> str:
        """Stable ``key=value`` rendering of the hyperparameters."""
        return ",".join(f"{k}={json.dumps(self.params[k], sort_keys=True)}" for k in sorted(self.params))


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_root: Path
    extractors: tuple[ExtractorSpec, ...]
    classifiers: tuple[ClassifierSpec, ...]
    test_fraction: float = 0.2
    seed: int = 0
    output_dir: Path = Path("results")
    cache_dir: Path | None = None
    save_models: bool = False
    batch_size: int = 16

    def __post_init__(self):
        if not self.extractors:
            raise ConfigError("config needs at least one extractor")
        if not self.classifiers:
            raise ConfigError("config needs at least one classifier")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 1 << 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if isinstance(self.batch_size, bool) or not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise ConfigError("batch_size must be a positive integer")
        for c in self.classifiers:
            if c.kind not in CLASSIFIER_KINDS:
                raise ConfigError(f"unknown classifier {c.kind!r}; expected one of {CLASSIFIER_KINDS}")
            unknown = set(c.params) - hyperparameters(c.kind)
            if unknown:
                raise ConfigError(f"unknown hyperparameters for {c.kind}: {sorted(unknown)}")
        keys = [(c.kind, c.canonical()) for c in self.classifiers]
        if len(set(keys)) != len(keys):
            raise ConfigError("duplicate classifier entries")

    def with_overrides(self, seed: int | None = None, output_dir: str | Path | None = None) -> "ExperimentConfig":
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if output_dir is not None:
            changes["output_dir"] = Path(output_dir)
        return replace(self, **changes) if changes else self


def _parse_extractor(entry, base: Path) -> ExtractorSpec:
    if entry == "baseline" or entry == {"kind": "baseline"}:
        return ExtractorSpec.baseline()
    if not isinstance(entry, dict):
        raise ConfigError(f"extractor entry must be 'baseline' or an object, got {entry!r}")
    unknown = set(entry) - {"manifest", "model"}
    if unknown or "manifest" not in entry:
        raise ConfigError(f"extractor entry needs 'manifest' (and optional 'model'); unknown keys {sorted(unknown)}")
    model = base / entry["model"] if "model" in entry else None
    return ExtractorSpec.from_manifest(base / entry["manifest"], model)


def _parse_classifier(entry) -> ClassifierSpec:
    if isinstance(entry, str):
        return ClassifierSpec(entry)
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError(f"classifier entry must be a kind name or {{'kind', 'params'}}, got {entry!r}")
    unknown = set(entry) - {"kind", "params"}
    if unknown:
        raise ConfigError(f"unknown keys in classifier entry: {sorted(unknown)}")
    params = entry.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("classifier params must be an object")
    return ClassifierSpec(entry["kind"], dict(params))


def config_from_dict(data: dict, base: str | Path = ".") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    base = Path(base)
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("dataset_root", "extractors", "classifiers"):
        if key not in data:
            raise ConfigError(f"config is missing {key!r}")
    if not isinstance(data["extractors"], list) or not isinstance(data["classifiers"], list):
        raise ConfigError("'extractors' and 'classifiers' must be lists")
    cache = data.get("cache_dir")
    test_fraction = data.get("test_fraction", 0.2)
    if isinstance(test_fraction, bool) or not isinstance(test_fraction, (int, float)):
        raise ConfigError("test_fraction must be a number")
    return ExperimentConfig(
        dataset_root=base / data["dataset_root"],
        extractors=tuple(_parse_extractor(e, base) for e in data["extractors"]),
        classifiers=tuple(_parse_classifier(c) for c in data["classifiers"]),
        test_fraction=float(test_fraction),
        seed=data.get("seed", 0),
        output_dir=base / data.get("output_dir", "results"),
        cache_dir=base / cache if cache is not None else None,
        save_models=bool(data.get("save_models", False)),
        batch_size=data.get("batch_size", 16),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data, path.parent)
