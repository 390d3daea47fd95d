"""Captioned grid of randomly chosen training images."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from ..dataset import SplitIndex, load_image
from ..errors import DegenerateInput
from ..rng import CONTACT_SHEET_STREAM, PortableRng

TILE = 160
CAPTION_H = 20


def choose_samples(split: SplitIndex, n: int, seed: int) -> list[int]:
    """Positions into ``split.index.entries`` of ``n`` distinct training images."""
    if n < 1 or n > len(split.train):
        raise DegenerateInput(f"need 1 <= n <= {len(split.train)} training images, got n={n}")
    picks = PortableRng(seed, CONTACT_SHEET_STREAM).sample_without_replacement(len(split.train), n)
    return [split.train[int(i)] for i in picks]


def export_contact_sheet(split: SplitIndex, n: int, seed: int, path: str | Path, columns: int | None = None) -> list[int]:
    chosen = choose_samples(split, n, seed)
    columns = columns or math.ceil(math.sqrt(n))
    rows = math.ceil(n / columns)
    sheet = Image.new("RGB", (columns * TILE, rows * (TILE + CAPTION_H)), "white")
    draw = ImageDraw.Draw(sheet)
    font = ImageFont.load_default()
    for slot, i in enumerate(chosen):
        img = load_image(split.index.path(i), (TILE, TILE))
        tile = Image.fromarray(np.round(img * 255).astype(np.uint8), "RGB")
        x, y = (slot % columns) * TILE, (slot // columns) * (TILE + CAPTION_H)
        sheet.paste(tile, (x, y))
        name = split.index.class_names[split.index.entries[i][1]]
        draw.text((x + 4, y + TILE + 4), name, fill="black", font=font)
    sheet.save(path, format="PNG")
    return chosen
