"""Walk through the pipeline one stage at a time with the baseline extractor.

    python demos/01_baseline_pipeline.py
"""
import tempfile
from pathlib import Path

import numpy as np

from citruspipe import evaluate, confusion, scan_dataset, stratified_split
from citruspipe.classify import fit
from citruspipe.featurex import ExtractorSpec
from citruspipe.runner import features_for
from synthetic import make_dataset

work = Path(tempfile.mkdtemp(prefix="citrus-demo-"))
root = make_dataset(work / "data", per_class=25)

# scanning sorts classes by directory name; class ids follow that order
index = scan_dataset(root)
print("classes:", index.class_counts())

# 25 images per class at fraction 0.2 -> exactly 5 test images per class
split = stratified_split(index, test_fraction=0.2, seed=0)
print(f"{len(split.train)} train / {len(split.test)} test, split hash {split.signature()[:12]}")

# the baseline extractor: 512-bin joint RGB histogram + 8x8 gray thumbnail
spec = ExtractorSpec.baseline()
train = features_for(split, spec, "train")
test = features_for(split, spec, "test")
print("feature matrix:", train.values.shape, train.values.dtype, train.extractor_id)

model = fit("knn", train.values, train.labels, n_classes=train.n_classes, k=5)
pred = model.predict(test.values)
report = evaluate(confusion(test.labels, pred, test.n_classes, index.class_names))

print("\nconfusion (rows actual, columns predicted):")
print(report.confusion.counts)
print(f"accuracy {report.accuracy:.3f}  macro recall {report.macro_recall:.3f}  "
      f"macro precision {report.macro_precision:.3f}  macro f1 {report.macro_f1:.3f}")
print("per-class recall:", np.round(report.recall, 3))
