from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from citruspipe.dataset import (
    DatasetIndex,
    load_image,
    per_class_test_count,
    resize_bilinear,
    scan_dataset,
    split_from_counts,
    stratified_split,
)
from citruspipe.errors import DecodeError, DegenerateSplit, EmptyClass, PathNotFound


def _save(path: Path, arr, mode=None):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode).save(path)


# --- scan_dataset ---------------------------------------------------------


def test_scan_sorted_and_filtered(tmp_path):
    for cls, names in {"scab": ["b.PNG", "a.jpg"], "canker": ["z.bmp", "x.jpeg", "notes.txt"]}.items():
        for n in names:
            p = tmp_path / cls / n
            if n.endswith(".txt"):
                p.parent.mkdir(parents=True, exist_ok=True)
                p.write_text("x")
            else:
                _save(p, np.zeros((4, 4, 3)))
    idx = scan_dataset(tmp_path)
    assert idx.class_names == ("canker", "scab")
    assert idx.entries == (("canker/x.jpeg", 0), ("canker/z.bmp", 0), ("scab/a.jpg", 1), ("scab/b.PNG", 1))


def test_scan_twice_identical(synth_dataset):
    assert scan_dataset(synth_dataset) == scan_dataset(synth_dataset)


def test_scan_counts(synth_dataset):
    idx = scan_dataset(synth_dataset)
    assert idx.class_counts() == {"blackspot": 10, "canker": 10, "fresh": 10, "greening": 10}


def test_scan_missing_root(tmp_path):
    with pytest.raises(PathNotFound):
        scan_dataset(tmp_path / "nope")


def test_scan_empty_class_named(synth_dataset):
    (synth_dataset / "melanose").mkdir()
    with pytest.raises(EmptyClass, match="melanose"):
        scan_dataset(synth_dataset)


def test_scan_no_classes(tmp_path):
    with pytest.raises(EmptyClass):
        scan_dataset(tmp_path)


# --- load_image -----------------------------------------------------------


def test_load_identity_red(tmp_path):
    red = np.zeros((224, 224, 3))
    red[..., 0] = 255
    _save(tmp_path / "red.png", red)
    img = load_image(tmp_path / "red.png")
    assert img.shape == (224, 224, 3)
    assert np.all(img == np.array([1.0, 0.0, 0.0]))


def test_load_constant_upscale(tmp_path):
    # 0.5 is not representable in 8 bits; build the decoded array directly
    gray = np.full((2, 2, 3), 0.5)
    out = resize_bilinear(gray, 224, 224)
    assert out.shape == (224, 224, 3)
    assert np.all(out == 0.5)

    _save(tmp_path / "g.png", np.full((2, 2, 3), 128))
    assert np.all(load_image(tmp_path / "g.png") == 128 / 255)


def test_resize_matches_opencv():
    cv2 = pytest.importorskip("cv2")
    rng = np.random.default_rng(0)
    for shape in [(2, 2, 3), (5, 7, 3), (300, 451, 3), (224, 224, 3), (37, 1000, 3)]:
        img = rng.random(shape)
        ours = resize_bilinear(img, 224, 224)
        ref = cv2.resize(img, (224, 224), interpolation=cv2.INTER_LINEAR)
        np.testing.assert_allclose(ours, ref, atol=1e-9)


def test_grayscale_replicated(tmp_path):
    g = np.arange(64, dtype=np.uint8).reshape(8, 8) * 3
    _save(tmp_path / "g.png", g, "L")
    img = load_image(tmp_path / "g.png")
    assert np.array_equal(img[..., 0], img[..., 1]) and np.array_equal(img[..., 1], img[..., 2])


def test_rgba_and_palette_become_rgb(tmp_path):
    rgba = np.zeros((10, 10, 4), dtype=np.uint8)
    rgba[..., 2] = 255
    rgba[..., 3] = 128
    Image.fromarray(rgba, "RGBA").save(tmp_path / "a.png")
    Image.fromarray(rgba[..., :3]).convert("P").save(tmp_path / "p.png")
    for name in ("a.png", "p.png"):
        img = load_image(tmp_path / name)
        assert img.shape == (224, 224, 3)
        np.testing.assert_allclose(img[0, 0], [0, 0, 1], atol=1e-2)


def test_jpeg_decodes_to_rgb_not_bgr(tmp_path):
    red = np.zeros((32, 32, 3))
    red[..., 0] = 255
    _save(tmp_path / "r.jpg", red)
    img = load_image(tmp_path / "r.jpg")
    assert img[..., 0].mean() > 0.9 and img[..., 2].mean() < 0.1


def test_decode_error(tmp_path):
    (tmp_path / "bad.png").write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        load_image(tmp_path / "bad.png")


@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_resize_output_bounded(h, w, seed):
    img = np.random.default_rng(seed).random((h, w, 3))
    out = resize_bilinear(img, 224, 224)
    assert np.all(np.isfinite(out)) and out.min() >= 0.0 and out.max() <= 1.0


# --- stratified_split -----------------------------------------------------


def test_round_half_up_counts():
    assert [per_class_test_count(n, 0.2) for n in (344, 349, 552, 369)] == [69, 70, 110, 74]
    assert per_class_test_count(50, 0.2) == 10
    assert per_class_test_count(2, 0.25) == 1  # exact .5 rounds up
    assert per_class_test_count(5, 0.5) == 3


def test_lemon_counts():
    s = split_from_counts([50, 50, 50, 50], 0.2, seed=0)
    assert (len(s.train), len(s.test)) == (160, 40)
    assert np.bincount(s.test_labels()).tolist() == [10, 10, 10, 10]


def test_orange_counts():
    s = split_from_counts([344, 349, 552, 369], 0.2, seed=0)
    assert (len(s.train), len(s.test)) == (1291, 323)
    assert np.bincount(s.test_labels()).tolist() == [69, 70, 110, 74]


def test_same_seed_identical_split(synth_dataset):
    idx = scan_dataset(synth_dataset)
    a, b = stratified_split(idx, 0.2, 11), stratified_split(idx, 0.2, 11)
    assert a == b and a.manifest_text() == b.manifest_text()


def test_seed_changes_membership():
    a = split_from_counts([50, 50], 0.2, seed=1)
    b = split_from_counts([50, 50], 0.2, seed=2)
    assert a.test != b.test


def test_degenerate_split():
    with pytest.raises(DegenerateSplit):
        split_from_counts([50, 2], 0.2)  # round_half_up(0.4) = 0
    with pytest.raises(DegenerateSplit):
        split_from_counts([1, 50], 0.6)  # round_half_up(0.6) = 1 = n
    with pytest.raises(DegenerateSplit):
        split_from_counts([10, 10], 1.0)


@given(st.lists(st.integers(3, 60), min_size=1, max_size=6), st.integers(0, 2**64 - 1))
@settings(max_examples=60, deadline=None)
def test_split_partition_property(counts, seed):
    s = split_from_counts(counts, 0.2, seed)
    train, test = set(s.train), set(s.test)
    assert not train & test
    assert train | test == set(range(sum(counts)))
    per_class = np.bincount(s.test_labels(), minlength=len(counts))
    assert per_class.tolist() == [per_class_test_count(n, 0.2) for n in counts]


def test_manifest_format(synth_dataset, tmp_path):
    s = stratified_split(scan_dataset(synth_dataset), 0.2, 0)
    s.write_manifest(tmp_path / "m.tsv")
    lines = (tmp_path / "m.tsv").read_text().splitlines()
    assert len(lines) == 40 and lines == sorted(lines)
    part, cls, rel = lines[0].split("\t")
    assert part in ("train", "test") and rel.startswith(cls + "/")
    assert sum(line.startswith("test\t") for line in lines) == 8


def test_index_invariants_hold():
    idx = DatasetIndex(Path("."), ("a", "b"), (("a/1.png", 0), ("b/1.png", 1)))
    assert list(idx.labels()) == [0, 1]
