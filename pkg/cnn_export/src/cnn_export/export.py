"""Embedding export with Keras DenseNet-169 / ResNet50.

The full classification model is instantiated first so its parameter count
can be checked against the published architecture sizes, then the global
average pool over the final convolutional features (the layer right below
the ImageNet head) is used as the embedding.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimMismatchError, ExportError, WeightsUnavailableError
from .manifest import load_manifest
from .store_writer import write_store

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")

INPUT_SIDE = 224

# published sizes: full ImageNet models including the 1000-class head
EXPECTED_PARAMS = {"densenet169": 14_307_880, "resnet50": 25_636_712}
EXPECTED_DIM = {"densenet169": 1664, "resnet50": 2048}


@dataclass(frozen=True)
class ExportSpec:
    model: str
    manifest_path: str
    dataset_root: str
    output_path: str
    split: str = "train"
    weights: str = "imagenet"   # "imagenet" or "none" (random init, seeded)
    batch_size: int = 32

    def __post_init__(self):
        if self.model not in EXPECTED_PARAMS:
            raise ExportError(f"unknown model {self.model!r}; "
                              f"choose from {sorted(EXPECTED_PARAMS)}")
        if self.weights not in ("imagenet", "none"):
            raise ExportError(f"weights must be 'imagenet' or 'none', got {self.weights!r}")


def _keras():
    import tensorflow as tf
    return tf


def build_feature_model(name: str, weights: str = "imagenet"):
    """Return (embedding model, preprocess_input) for the named network.

    The full model's parameter count is asserted against the published
    value before the embedding sub-model is cut at the avg_pool layer.
    """
    tf = _keras()
    if weights == "none":
        tf.keras.utils.set_random_seed(0)  # reproducible random init
    constructors = {
        "densenet169": (tf.keras.applications.DenseNet169,
                        tf.keras.applications.densenet.preprocess_input),
        "resnet50": (tf.keras.applications.ResNet50,
                     tf.keras.applications.resnet50.preprocess_input),
    }
    constructor, preprocess = constructors[name]
    try:
        full = constructor(weights=None if weights == "none" else weights)
    except Exception as exc:
        raise WeightsUnavailableError(
            f"could not obtain {weights!r} weights for {name}: {exc}") from exc

    n_params = full.count_params()
    if n_params != EXPECTED_PARAMS[name]:
        raise DimMismatchError(
            f"{name}: parameter count {n_params} != expected {EXPECTED_PARAMS[name]}")

    pooled = full.get_layer("avg_pool").output
    feature_model = tf.keras.Model(inputs=full.input, outputs=pooled)
    dim = int(feature_model.output_shape[-1])
    if dim != EXPECTED_DIM[name]:
        raise DimMismatchError(f"{name}: embedding dim {dim} != expected {EXPECTED_DIM[name]}")
    return feature_model, preprocess


def load_input_image(path) -> np.ndarray:
    """Load one preprocessed image as a (224, 224, 3) float32 array in 0..255.

    Inputs are expected to come from the benchmark's `preprocess` command;
    single-channel data is replicated to three identical channels.
    """
    with Image.open(path) as im:
        im.load()
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB")
        arr = np.asarray(im, dtype=np.float32)
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    if arr.shape[:2] != (INPUT_SIDE, INPUT_SIDE):
        raise ExportError(
            f"{path}: expected a preprocessed {INPUT_SIDE}x{INPUT_SIDE} image, "
            f"got {arr.shape[1]}x{arr.shape[0]} (run the benchmark's "
            "preprocess command first)")
    return arr


def export_features(spec: ExportSpec) -> int:
    """Write one embedding row per manifest record in the chosen split.

    Rows are sorted by record_id so the output is deterministic. Returns
    the number of rows written.
    """
    manifest = load_manifest(spec.manifest_path)
    records = sorted(manifest.split_records(spec.split), key=lambda r: r.record_id)
    if not records:
        raise ExportError(f"manifest has no records in split {spec.split!r}")

    model, preprocess = build_feature_model(spec.model, spec.weights)
    root = Path(spec.dataset_root)

    rows = np.empty((len(records), EXPECTED_DIM[spec.model]), dtype=np.float32)
    for start in range(0, len(records), spec.batch_size):
        chunk = records[start:start + spec.batch_size]
        batch = np.stack([load_input_image(root / r.record_id) for r in chunk])
        feats = model.predict(preprocess(batch), verbose=0)
        rows[start:start + len(chunk)] = feats

    write_store(spec.output_path,
                classes=manifest.classes,
                record_ids=[r.record_id for r in records],
                labels=[manifest.label_index(r.label) for r in records],
                values=rows)
    return len(records)
