"""Macro metrics computed straight from published confusion-matrix counts.

    python demos/03_metrics_from_counts.py

Macro F1 here is the mean of per-class F1 scores. Taking the harmonic mean of
macro precision and macro recall instead gives a slightly different number,
printed alongside for comparison.
"""
from citruspipe.metrics import ConfusionMatrix, evaluate, micro_recall

lemon = ConfusionMatrix.from_rows(
    [[6, 0, 0, 0], [0, 14, 0, 1], [0, 0, 9, 0], [0, 0, 0, 10]],
    ("healthy", "canker", "mold", "scab"),
)
orange = ConfusionMatrix.from_rows(
    [[70, 2, 0, 0], [0, 78, 0, 0], [0, 0, 102, 0], [0, 0, 0, 71]],
    ("blackspot", "canker", "fresh", "greening"),
)

for name, cm in (("lemon", lemon), ("orange", orange)):
    r = evaluate(cm)
    harmonic = 2 * r.macro_precision * r.macro_recall / (r.macro_precision + r.macro_recall)
    print(f"{name}: n={cm.total}")
    print(f"  accuracy        {r.accuracy:.6f}")
    print(f"  macro recall    {r.macro_recall:.6f}   (micro recall {micro_recall(cm):.6f})")
    print(f"  macro precision {r.macro_precision:.6f}")
    print(f"  macro f1        {r.macro_f1:.6f}   (harmonic of macros {harmonic:.6f})")
    for cls, p, rc in zip(cm.class_names, r.precision, r.recall):
        print(f"    {cls:<10} precision {p:.4f} recall {rc:.4f}")
