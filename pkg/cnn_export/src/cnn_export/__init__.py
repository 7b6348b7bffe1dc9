"""cnn_export: pretrained DenseNet-169 / ResNet50 embedding export."""

from .export import (
    EXPECTED_DIM,
    EXPECTED_PARAMS,
    ExportSpec,
    build_feature_model,
    export_features,
)
from .manifest import Manifest, Record, load_manifest
from .store_writer import write_store

__version__ = "0.1.0"
