import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


def make_class_image(rng, class_index, height=96, width=128):
    """Synthetic grayscale image with class-dependent stripe orientation and
    period, plus noise; gives the linear classifier real signal."""
    yy, xx = np.mgrid[0:height, 0:width]
    angle = class_index * np.pi / 4
    period = 8 + 4 * class_index
    wave = np.sin(2 * np.pi * (xx * np.cos(angle) + yy * np.sin(angle)) / period)
    img = 0.5 + 0.35 * wave + 0.1 * rng.standard_normal((height, width))
    return np.clip(img, 0.0, 1.0)


def write_corpus(root: Path, split_counts, classes=("CNV", "DME", "DRUSEN", "NORMAL"),
                 seed=123):
    """Create a <root>/<split>/<class>/img.png corpus; returns image count."""
    rng = np.random.default_rng(seed)
    n = 0
    for split, per_class in split_counts.items():
        for ci, cls in enumerate(classes):
            d = root / split / cls
            d.mkdir(parents=True, exist_ok=True)
            for i in range(per_class):
                img = make_class_image(rng, ci)
                data = np.clip(np.rint(img * 255), 0, 255).astype(np.uint8)
                Image.fromarray(data, mode="L").save(d / f"{cls.lower()}_{i:03d}.png")
                n += 1
    return n


@pytest.fixture(scope="session")
def corpus_root(tmp_path_factory):
    """80-image corpus: 14 train + 6 test per class."""
    root = tmp_path_factory.mktemp("corpus")
    write_corpus(root, {"train": 14, "test": 6})
    return root
