"""Run the extractor x classifier grid from a config and look at the outputs.

    python demos/02_classifier_grid.py

The same run from the shell would be ``citruspipe experiment --config cfg.json``.
"""
import json
import tempfile
from pathlib import Path

from citruspipe.runner import load_config, read_results_csv, run_experiment
from synthetic import make_dataset

work = Path(tempfile.mkdtemp(prefix="citrus-grid-"))
make_dataset(work / "data", per_class=20, seed=3)

cfg = {
    "dataset_root": "data",
    "seed": 0,
    "extractors": ["baseline"],
    "classifiers": [
        "knn",
        {"kind": "knn", "params": {"k": 1}},
        "naive_bayes",
        {"kind": "random_forest", "params": {"n_trees": 50}},
        {"kind": "logistic_regression", "params": {"l2": 0.01}},
    ],
    "output_dir": "results",
    "cache_dir": "cache",
    "save_models": True,
}
(work / "cfg.json").write_text(json.dumps(cfg, indent=2))

records = run_experiment(load_config(work / "cfg.json"))
for r in records:
    print(f"{r.classifier:<24} acc {r.accuracy:.3f}  f1 {r.f1:.3f}  fit {r.train_seconds * 1000:.0f} ms")

out = work / "results"
print("\noutputs:", sorted(p.name for p in out.iterdir()))
print("reports:", sorted(p.name for p in (out / "reports").iterdir()))

# a second run hits the feature cache and reproduces results.csv byte for byte
before = (out / "results.csv").read_bytes()
run_experiment(load_config(work / "cfg.json"))
print("rerun identical:", before == (out / "results.csv").read_bytes())
print("accuracies read back from csv:", [r.accuracy for r in read_results_csv(out / "results.csv")])
