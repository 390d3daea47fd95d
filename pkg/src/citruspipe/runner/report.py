"""Result tables (CSV) and grouped metric bar charts (SVG)."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from ..errors import DegenerateInput

CSV_HEADER = ("extractor", "classifier", "accuracy", "recall", "precision", "f1")
METRICS = ("accuracy", "recall", "precision", "f1")
# one fill per metric, in METRICS order
PALETTE = ("#4C72B0", "#DD8452", "#55A868", "#C44E52", "#8172B3", "#937860")


@dataclass(frozen=True)
class ResultRecord:
    extractor: str  # display label, e.g. "resnet50"
    extractor_id: str
    classifier: str  # display label, e.g. "knn"
    classifier_kind: str
    hyperparameters: str
    accuracy: float
    recall: float
    precision: float
    f1: float
    train_seconds: float = 0.0
    predict_seconds: float = 0.0

    def metric(self, name: str) -> float:
        return getattr(self, name)


def results_csv_text(records) -> str:
    if not records:
        raise DegenerateInput("no result records")
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.extractor, r.classifier] + [f"{r.metric(m):.4f}" for m in METRICS])
    return out.getvalue()


def write_results_csv(records, path: str | Path) -> None:
    Path(path).write_text(results_csv_text(records), encoding="utf-8")


def write_timings_csv(records, path: str | Path) -> None:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("extractor", "classifier", "hyperparameters", "train_seconds", "predict_seconds"))
    for r in records:
        w.writerow([r.extractor, r.classifier, r.hyperparameters, f"{r.train_seconds:.3f}", f"{r.predict_seconds:.3f}"])
    Path(path).write_text(out.getvalue(), encoding="utf-8")


def read_results_csv(path: str | Path) -> list[ResultRecord]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise DegenerateInput(f"{path} does not have the results header {','.join(CSV_HEADER)}")
        return [
            ResultRecord(row["extractor"], row["extractor"], row["classifier"], row["classifier"], "",
                         *(float(row[m]) for m in METRICS))
            for row in reader
        ]


def metric_chart_svg(records, metrics=METRICS, title: str = "") -> str:
    """Grouped bars: one group per record, one bar per metric, y axis fixed to [0, 1].

    Group labels show the classifier, prefixed by the extractor when the
    records span more than one extractor.
    """
    if not records:
        raise DegenerateInput("no result records to chart")
    metrics = tuple(metrics)
    if not metrics or any(m not in METRICS for m in metrics):
        raise DegenerateInput(f"metrics must be a non-empty subset of {METRICS}")
    multi = len({r.extractor for r in records}) > 1

    bar_w, gap = 18, 24
    group_w = bar_w * len(metrics) + gap
    left, right, top, bottom = 60, 20, 40 if title else 20, 90
    plot_h = 300
    width = left + right + group_w * len(records)
    height = top + plot_h + bottom

    def y(v: float) -> float:
        return top + plot_h * (1.0 - min(max(v, 0.0), 1.0))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height + 24}" '
        f'viewBox="0 0 {width} {height + 24}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height + 24}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for i in range(11):
        v = i / 10
        parts.append(
            f'<line x1="{left}" y1="{y(v):.1f}" x2="{width - right}" y2="{y(v):.1f}" stroke="#dddddd"/>'
            f'<text x="{left - 6}" y="{y(v) + 4:.1f}" text-anchor="end">{v:.1f}</text>'
        )
    parts.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="#000000"/>')
    for g, r in enumerate(records):
        x0 = left + gap / 2 + g * group_w
        for j, m in enumerate(metrics):
            v = r.metric(m)
            parts.append(
                f'<rect x="{x0 + j * bar_w:.1f}" y="{y(v):.1f}" width="{bar_w - 2}" '
                f'height="{top + plot_h - y(v):.1f}" fill="{PALETTE[METRICS.index(m)]}">'
                f"<title>{escape(m)}: {v:.4f}</title></rect>"
            )
        label = f"{r.extractor} / {r.classifier}" if multi else r.classifier
        cx = x0 + bar_w * len(metrics) / 2
        parts.append(
            f'<text x="{cx:.1f}" y="{top + plot_h + 14}" text-anchor="end" '
            f'transform="rotate(-30 {cx:.1f} {top + plot_h + 14})">{escape(label)}</text>'
        )
    for j, m in enumerate(metrics):
        lx = left + j * 90
        parts.append(
            f'<rect x="{lx}" y="{height + 6}" width="10" height="10" fill="{PALETTE[METRICS.index(m)]}"/>'
            f'<text x="{lx + 14}" y="{height + 15}">{escape(m)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_metric_chart(records, metrics=METRICS, path: str | Path = "metrics.svg", title: str = "") -> None:
    Path(path).write_text(metric_chart_svg(records, metrics, title), encoding="utf-8")
