import pytest

from citruspipe.errors import DegenerateInput
from citruspipe.runner import ResultRecord, metric_chart_svg, read_results_csv, render_metric_chart, results_csv_text, write_results_csv


def rec(ex="resnet50", clf="logistic_regression", acc=0.975, r=0.98, p=0.97, f=0.975):
    return ResultRecord(ex, ex + ":id", clf, clf, "", acc, r, p, f, 0.1, 0.01)


def test_csv_formatting():
    text = results_csv_text([rec()])
    lines = text.splitlines()
    assert lines[0] == "extractor,classifier,accuracy,recall,precision,f1"
    assert lines[1] == "resnet50,logistic_regression,0.9750,0.9800,0.9700,0.9750"


def test_csv_twelve_rows(tmp_path):
    records = [rec(ex, clf) for ex in ("vgg16", "vgg19", "resnet50") for clf in ("knn", "naive_bayes", "random_forest", "logistic_regression")]
    write_results_csv(records, tmp_path / "r.csv")
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 13
    back = read_results_csv(tmp_path / "r.csv")
    assert [(b.extractor, b.classifier, b.accuracy) for b in back] == [(r.extractor, r.classifier, r.accuracy) for r in records]


def test_empty_records():
    with pytest.raises(DegenerateInput):
        results_csv_text([])
    with pytest.raises(DegenerateInput):
        metric_chart_svg([])


def test_svg_deterministic_and_structured(tmp_path):
    records = [rec(clf=c) for c in ("knn", "naive_bayes", "random_forest", "logistic_regression")]
    render_metric_chart(records, path=tmp_path / "a.svg", title="Lemon")
    render_metric_chart(records, path=tmp_path / "b.svg", title="Lemon")
    a = (tmp_path / "a.svg").read_bytes()
    assert a == (tmp_path / "b.svg").read_bytes()
    svg = a.decode()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<title>") == 16  # 4 groups x 4 metrics
    assert ">1.0</text>" in svg and ">0.0</text>" in svg


def test_svg_metric_subset():
    svg = metric_chart_svg([rec()], metrics=("accuracy", "f1"))
    assert svg.count("<title>") == 2
    with pytest.raises(DegenerateInput):
        metric_chart_svg([rec()], metrics=("auc",))
