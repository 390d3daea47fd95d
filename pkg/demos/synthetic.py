"""Small generated image sets for the demos.

Each class is a noisy field around one base colour, which is enough for the
colour-histogram extractor to separate most images.
"""
from pathlib import Path

import numpy as np
from PIL import Image

COLOURS = {
    "blackspot": (70, 50, 40),
    "canker": (150, 120, 50),
    "fresh": (230, 150, 30),
    "greening": (120, 160, 70),
}


def make_dataset(root, per_class=25, seed=0, size=(60, 80), noise=45.0) -> Path:
    root = Path(root)
    rng = np.random.default_rng(seed)
    for name, colour in COLOURS.items():
        d = root / name
        d.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            px = np.clip(rng.normal(colour, noise, (*size, 3)), 0, 255).astype(np.uint8)
            Image.fromarray(px).save(d / f"{name}_{i:03d}.png")
    return root
