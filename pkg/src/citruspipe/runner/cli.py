"""``citruspipe`` command line.

Exit codes: 0 success, 2 configuration error, 3 data or model error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..classify import CLASSIFIER_KINDS, fit, load_model, save_model
from ..dataset import scan_dataset, stratified_split
from ..errors import CitrusError, ConfigError
from ..featurex import ExtractorSpec
from ..metrics import confusion, evaluate
from .cache import load_features, save_features
from .config import load_config
from .contact import export_contact_sheet
from .experiment import CellError, features_for, run_experiment
from .report import read_results_csv, render_metric_chart

EXIT_CONFIG = 2
EXIT_DATA = 3


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _extractor(args) -> ExtractorSpec:
    if args.extractor == "baseline":
        return ExtractorSpec.baseline()
    return ExtractorSpec.from_manifest(args.extractor, args.model)


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_scan(args):
    index = scan_dataset(args.root)
    print(json.dumps({"root": str(index.root), "classes": index.class_counts(), "total": len(index)}, indent=2))


def cmd_split(args):
    split = stratified_split(scan_dataset(args.root), args.test_fraction, args.seed)
    path = _out(args) / "split.tsv"
    split.write_manifest(path)
    print(f"{len(split.train)} train / {len(split.test)} test -> {path}")


def cmd_extract(args):
    spec = _extractor(args)
    split = stratified_split(scan_dataset(args.root), args.test_fraction, args.seed)
    out = _out(args)
    for part in ("train", "test"):
        fm = features_for(split, spec, part, batch_size=args.batch_size)
        save_features(out / f"{part}.fcache", fm)
        print(f"{part}: {fm.rows} x {fm.dim} -> {out / f'{part}.fcache'}")


def cmd_train(args):
    fm = load_features(args.features)
    model = fit(args.classifier, fm.values, fm.labels, n_classes=fm.n_classes, **dict(args.param))
    path = _out(args) / f"{args.classifier}.cmdl"
    save_model(model, path)
    print(f"{args.classifier} trained on {fm.rows} rows -> {path}")


def cmd_evaluate(args):
    model = load_model(args.model)
    fm = load_features(args.features)
    names = tuple(args.class_names.split(",")) if args.class_names else ()
    report = evaluate(confusion(fm.labels, model.predict(fm.values), fm.n_classes, names))
    path = _out(args) / "report.json"
    report.write_json(path)
    print(report.to_json(), end="")


def cmd_experiment(args):
    if not args.config:
        raise ConfigError("experiment needs --config")
    config = load_config(args.config).with_overrides(seed=args.seed_override, output_dir=args.out_override)
    records = run_experiment(config)
    print(f"{len(records)} cells -> {Path(config.output_dir) / 'results.csv'}")


def cmd_report(args):
    records = read_results_csv(args.results)
    metrics = tuple(args.metrics.split(","))
    path = _out(args) / args.name
    render_metric_chart(records, metrics, path, title=args.title)
    print(f"chart -> {path}")


def cmd_contact_sheet(args):
    split = stratified_split(scan_dataset(args.root), args.test_fraction, args.seed)
    path = _out(args) / "contact_sheet.png"
    chosen = export_contact_sheet(split, args.n, args.seed, path)
    print(f"{len(chosen)} tiles -> {path}")


def build_parser() -> argparse.ArgumentParser:
    def global_flags(default):
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--seed", type=int, default=default, help="RNG seed (default 0)")
        g.add_argument("--config", default=default, help="experiment config JSON")
        g.add_argument("--out", default=default, help="output directory (default: results)")
        g.add_argument("-v", "--verbose", action="store_true", default=default or False)
        return g

    # global flags work before or after the subcommand; the subcommand copy
    # must not reset values given before it
    common = global_flags(argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="citruspipe", description="CNN-feature citrus disease classification",
                                parents=[global_flags(None)])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=func)
        return sp

    def with_split(sp):
        sp.add_argument("root", help="dataset root, one subdirectory per class")
        sp.add_argument("--test-fraction", type=float, default=0.2)

    add("scan", cmd_scan, "list classes and image counts").add_argument("root")
    with_split(add("split", cmd_split, "write the train/test split manifest"))

    sp = add("extract", cmd_extract, "extract train/test feature caches")
    with_split(sp)
    sp.add_argument("--extractor", default="baseline", help="'baseline' or a model manifest JSON")
    sp.add_argument("--model", help="ONNX file (default: next to the manifest)")
    sp.add_argument("--batch-size", type=int, default=16)

    sp = add("train", cmd_train, "fit a classifier on a feature cache")
    sp.add_argument("features")
    sp.add_argument("--classifier", choices=CLASSIFIER_KINDS, required=True)
    sp.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE")

    sp = add("evaluate", cmd_evaluate, "evaluate a trained model on a feature cache")
    sp.add_argument("model")
    sp.add_argument("features")
    sp.add_argument("--class-names", help="comma-separated, in class-id order")

    add("experiment", cmd_experiment, "run the extractor x classifier grid")

    sp = add("report", cmd_report, "render an SVG chart from results.csv")
    sp.add_argument("results")
    sp.add_argument("--metrics", default="accuracy,recall,precision,f1")
    sp.add_argument("--name", default="metrics.svg")
    sp.add_argument("--title", default="")

    sp = add("contact-sheet", cmd_contact_sheet, "grid of random captioned training images")
    with_split(sp)
    sp.add_argument("-n", type=int, default=16)
    return p


def _resolve_globals(args) -> None:
    # experiment: config owns seed/output unless the flags are given
    args.seed_override = args.seed
    args.out_override = args.out
    if args.seed is None:
        args.seed = 0
    if args.out is None:
        args.out = "results"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    _resolve_globals(args)
    try:
        args.func(args)
    except CellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.error, ConfigError) else EXIT_DATA
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CitrusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
