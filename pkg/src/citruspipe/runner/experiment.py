"""Grid runs: every extractor x every classifier on one shared split."""
from __future__ import annotations

import hashlib
import json
import logging
import time
from pathlib import Path
from typing import Iterator

from ..classify import fit, save_model
from ..dataset import SplitIndex, load_image, scan_dataset, stratified_split
from ..errors import CitrusError
from ..featurex import ExtractorSpec, FeatureMatrix, OnnxExtractor, extract_features, extractor_id
from ..metrics import confusion, evaluate
from .cache import load_features, save_features
from .config import ClassifierSpec, ExperimentConfig
from .report import ResultRecord, render_metric_chart, write_results_csv, write_timings_csv

log = logging.getLogger(__name__)


class CellError(CitrusError):
    """A grid cell failed; wraps the original error with the cell's name."""

    def __init__(self, cell: str, error: Exception):
        super().__init__(f"{cell}: {error}")
        self.cell = cell
        self.error = error


def extractor_label(spec: ExtractorSpec) -> str:
    return spec.kind if spec.tap == "flatten_last_conv" else f"{spec.kind}-gap"


def classifier_labels(classifiers) -> list[str]:
    kinds = [c.kind for c in classifiers]
    return [
        c.kind if kinds.count(c.kind) == 1 else f"{c.kind}[{c.canonical() or 'defaults'}]" for c in classifiers
    ]


def _images(split: SplitIndex, positions) -> Iterator:
    for i in positions:
        yield load_image(split.index.path(i))


def features_for(
    split: SplitIndex,
    spec: ExtractorSpec,
    part: str,
    cache_dir: Path | None = None,
    batch_size: int = 16,
    extractor: OnnxExtractor | None = None,
) -> FeatureMatrix:
    """Train or test features for one extractor, via the cache when configured.

    Cache entries are keyed by the extractor id and the split signature, so a
    different model file or different split membership never hits.
    """
    positions = split.train if part == "train" else split.test
    fid = extractor_id(spec)
    cache_path = None
    if cache_dir is not None:
        key = hashlib.sha256(f"{fid}\n{split.signature()}".encode()).hexdigest()[:24]
        cache_path = Path(cache_dir) / f"{key}-{part}.fcache"
        if cache_path.is_file():
            fm = load_features(cache_path)
            if fm.extractor_id == fid and fm.rows == len(positions):
                log.info("feature cache hit: %s", cache_path.name)
                return fm
    labels = split.index.labels()[list(positions)]
    fm = extract_features(_images(split, positions), labels, spec, split.index.n_classes, batch_size, extractor)
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        save_features(cache_path, fm)
    return fm


def _cell_file(extractor: str, classifier: str) -> str:
    safe = lambda s: "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in s)  # noqa: E731
    return f"{safe(extractor)}__{safe(classifier)}"


def run_cell(
    train: FeatureMatrix,
    test: FeatureMatrix,
    clf: ClassifierSpec,
    class_names,
    seed: int,
):
    """Fit, predict and evaluate one classifier; returns (model, report, seconds)."""
    params = dict(clf.params)
    if clf.kind == "random_forest":
        params.setdefault("seed", seed)
    t0 = time.perf_counter()
    model = fit(clf.kind, train.values, train.labels, n_classes=train.n_classes, **params)
    t1 = time.perf_counter()
    y_pred = model.predict(test.values)
    t2 = time.perf_counter()
    report = evaluate(confusion(test.labels, y_pred, train.n_classes, class_names))
    return model, report, (t1 - t0, t2 - t1)


def run_experiment(config: ExperimentConfig) -> list[ResultRecord]:
    out = Path(config.output_dir)
    index = scan_dataset(config.dataset_root)
    split = stratified_split(index, config.test_fraction, config.seed)
    out.mkdir(parents=True, exist_ok=True)
    (out / "reports").mkdir(exist_ok=True)
    split.write_manifest(out / "split.tsv")
    log.info("split: %d train / %d test over %d classes", len(split.train), len(split.test), index.n_classes)

    clf_labels = classifier_labels(config.classifiers)
    records: list[ResultRecord] = []
    for spec in config.extractors:
        ex_label = extractor_label(spec)
        try:
            onnx = OnnxExtractor(spec) if spec.kind != "baseline" else None
            train = features_for(split, spec, "train", config.cache_dir, config.batch_size, onnx)
            test = features_for(split, spec, "test", config.cache_dir, config.batch_size, onnx)
        except CitrusError as exc:
            raise CellError(f"extractor {ex_label}", exc) from exc
        log.info("%s: %d x %d train features", ex_label, train.rows, train.dim)

        for clf, clf_label in zip(config.classifiers, clf_labels):
            cell = f"{ex_label} x {clf_label}"
            try:
                model, report, (t_fit, t_pred) = run_cell(train, test, clf, index.class_names, config.seed)
            except CitrusError as exc:
                raise CellError(cell, exc) from exc
            log.info("%s: accuracy %.4f", cell, report.accuracy)
            stem = _cell_file(ex_label, clf_label)
            doc = {
                "extractor": ex_label,
                "extractor_id": train.extractor_id,
                "classifier": clf.kind,
                "hyperparameters": clf.canonical(),
                "seed": config.seed,
                **report.to_dict(),
            }
            (out / "reports" / f"{stem}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
            if config.save_models:
                (out / "models").mkdir(exist_ok=True)
                save_model(model, out / "models" / f"{stem}.cmdl")
            records.append(
                ResultRecord(ex_label, train.extractor_id, clf_label, clf.kind, clf.canonical(),
                             report.accuracy, report.macro_recall, report.macro_precision, report.macro_f1,
                             t_fit, t_pred)
            )

    records.sort(key=lambda r: (r.extractor, r.classifier))
    write_results_csv(records, out / "results.csv")
    write_timings_csv(records, out / "timings.csv")
    render_metric_chart(records, path=out / "metrics.svg", title=Path(config.dataset_root).name)
    for ex in sorted({r.extractor for r in records}):
        subset = [r for r in records if r.extractor == ex]
        render_metric_chart(subset, path=out / f"metrics_{_cell_file(ex, '')[:-2]}.svg", title=ex)
    return records
