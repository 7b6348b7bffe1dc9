import numpy as np
import pytest
from PIL import Image


def write_preprocessed_tree(root, per_class=2, classes=("CNV", "DME"), split="test",
                            seed=7):
    """224x224 grayscale PNGs in record_id paths plus a manifest CSV."""
    rng = np.random.default_rng(seed)
    lines = ["record_id,label,split"]
    for cls in classes:
        d = root / split / cls
        d.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            rid = f"{split}/{cls}/{cls.lower()}_{i}.png"
            img = (rng.random((224, 224)) * 255).astype(np.uint8)
            Image.fromarray(img, mode="L").save(root / rid)
            lines.append(f"{rid},{cls},{split}")
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


@pytest.fixture(scope="session")
def data_tree(tmp_path_factory):
    root = tmp_path_factory.mktemp("prep")
    manifest = write_preprocessed_tree(root)
    return {"root": root, "manifest": manifest}
