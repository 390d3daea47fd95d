"""Directory-per-class image datasets: scanning, decoding, and splitting.

Images are kept in one canonical form throughout the package: float64
``H x W x 3`` arrays in ``[0, 1]``, RGB channel order. Any model-specific
channel order or normalization is applied later, in :mod:`citruspipe.featurex`.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, DegenerateSplit, EmptyClass, PathNotFound
from .rng import SPLIT_STREAM, PortableRng

IMAGE_EXTENSIONS = frozenset({".png", ".jpg", ".jpeg", ".bmp"})
TARGET_SIZE = (224, 224)


@dataclass(frozen=True)
class DatasetIndex:
    """Sorted listing of a ``<root>/<class_name>/<image>`` tree.

    ``entries`` holds ``(relative_path, class_id)`` pairs with POSIX-style
    paths relative to ``root``, sorted by ``(class_id, relative_path)``.
    """

    root: Path
    class_names: tuple[str, ...]
    entries: tuple[tuple[str, int], ...]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def __len__(self) -> int:
        return len(self.entries)

    def path(self, i: int) -> Path:
        return self.root / self.entries[i][0]

    def labels(self) -> np.ndarray:
        return np.array([c for _, c in self.entries], dtype=np.int64)

    def class_counts(self) -> dict[str, int]:
        counts = np.bincount(self.labels(), minlength=self.n_classes)
        return {name: int(n) for name, n in zip(self.class_names, counts)}


@dataclass(frozen=True)
class SplitIndex:
    """Train/test partition of a :class:`DatasetIndex`.

    ``train`` and ``test`` are ascending positions into ``index.entries``.
    """

    index: DatasetIndex
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int
    test_fraction: float

    def manifest_lines(self) -> list[str]:
        lines = []
        for part, members in (("train", self.train), ("test", self.test)):
            for i in members:
                rel, c = self.index.entries[i]
                lines.append(f"{part}\t{self.index.class_names[c]}\t{rel}")
        return sorted(lines)

    def manifest_text(self) -> str:
        return "".join(line + "\n" for line in self.manifest_lines())

    def signature(self) -> str:
        """Content hash of the split membership (paths, classes, partition)."""
        return hashlib.sha256(self.manifest_text().encode("utf-8")).hexdigest()

    def write_manifest(self, path: str | Path) -> None:
        Path(path).write_text(self.manifest_text(), encoding="utf-8")

    def train_labels(self) -> np.ndarray:
        return self.index.labels()[list(self.train)]

    def test_labels(self) -> np.ndarray:
        return self.index.labels()[list(self.test)]


def _is_image(p: Path) -> bool:
    return p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS


def scan_dataset(root: str | Path) -> DatasetIndex:
    root = Path(root)
    if not root.is_dir():
        raise PathNotFound(f"dataset root not found: {root}")
    class_dirs = sorted((d for d in root.iterdir() if d.is_dir()), key=lambda d: d.name)
    if not class_dirs:
        raise EmptyClass(f"no class subdirectories under {root}")

    entries = []
    for class_id, d in enumerate(class_dirs):
        files = sorted(p.name for p in d.iterdir() if _is_image(p))
        if not files:
            raise EmptyClass(f"class {d.name!r} contains no images")
        entries.extend((f"{d.name}/{name}", class_id) for name in files)
    return DatasetIndex(root, tuple(d.name for d in class_dirs), tuple(entries))


def resize_bilinear(img: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize with half-pixel centers and edge clamping.

    Same sampling grid as OpenCV's ``INTER_LINEAR``; no antialiasing when
    downscaling.
    """
    h, w = img.shape[:2]
    if (h, w) == (height, width):
        return img.copy()

    def axis(n_in: int, n_out: int):
        pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        pos = np.clip(pos, 0.0, n_in - 1)
        lo = np.floor(pos).astype(np.int64)
        hi = np.minimum(lo + 1, n_in - 1)
        return lo, hi, pos - lo

    y0, y1, fy = axis(h, height)
    x0, x1, fx = axis(w, width)
    fx = fx[None, :, None]
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bottom = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    fy = fy[:, None, None]
    out = top * (1 - fy) + bottom * fy
    return np.clip(out, 0.0, 1.0)


def decode_image(path: str | Path) -> np.ndarray:
    """Decode to an ``H x W x 3`` float64 RGB array in ``[0, 1]``, no resizing."""
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I;16", "I;16L", "I;16B", "I"):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
            elif im.mode == "F":
                arr = np.asarray(im, dtype=np.float64)
            elif im.mode in ("L", "1"):
                arr = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
            else:
                arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc

    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DecodeError(f"zero-sized image: {path}")
    if not np.all(np.isfinite(arr)):
        raise DecodeError(f"non-finite pixel values in {path}")
    return np.clip(arr, 0.0, 1.0)


def load_image(path: str | Path, target: tuple[int, int] = TARGET_SIZE) -> np.ndarray:
    """Decode and bilinearly resize to ``target`` (height, width)."""
    return resize_bilinear(decode_image(path), *target)


def round_half_up(x: Decimal) -> int:
    return int(x.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def per_class_test_count(n: int, test_fraction: float) -> int:
    """Per-class test size: ``round_half_up(test_fraction * n)``.

    The product is taken in decimal arithmetic on the shortest repr of
    ``test_fraction`` so e.g. ``0.25 * 2`` rounds to 1 without float fuzz.
    """
    return round_half_up(Decimal(repr(float(test_fraction))) * n)


def stratified_split(index: DatasetIndex, test_fraction: float = 0.2, seed: int = 0) -> SplitIndex:
    """Per-class seeded shuffle; the leading ``test_count`` entries go to test."""
    if not 0.0 < test_fraction < 1.0:
        raise DegenerateSplit(f"test_fraction must lie in (0, 1), got {test_fraction}")
    by_class: dict[int, list[int]] = {c: [] for c in range(index.n_classes)}
    for i, (_, c) in enumerate(index.entries):
        by_class[c].append(i)

    train: list[int] = []
    test: list[int] = []
    for c, members in by_class.items():
        n_test = per_class_test_count(len(members), test_fraction)
        if n_test == 0 or n_test == len(members):
            raise DegenerateSplit(
                f"class {index.class_names[c]!r} with {len(members)} images "
                f"gets {n_test} test images at fraction {test_fraction}"
            )
        shuffled = PortableRng(seed, SPLIT_STREAM + c).shuffle(members)
        test.extend(shuffled[:n_test])
        train.extend(shuffled[n_test:])
    return SplitIndex(index, tuple(sorted(train)), tuple(sorted(test)), seed, float(test_fraction))


def split_from_counts(counts: list[int], test_fraction: float = 0.2, seed: int = 0) -> SplitIndex:
    """Split a synthetic index with the given per-class sizes (no files involved)."""
    names = tuple(f"class{c}" for c in range(len(counts)))
    entries = tuple(
        (f"{names[c]}/{i:05d}.png", c) for c in range(len(counts)) for i in range(counts[c])
    )
    return stratified_split(DatasetIndex(Path("."), names, entries), test_fraction, seed)
