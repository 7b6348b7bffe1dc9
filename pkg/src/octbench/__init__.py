"""octbench: feature extraction and linear-classifier benchmarking for OCT images."""

from .classifier import (
    AdamState,
    ClassifierModel,
    TrainConfig,
    TrainHistory,
    adam_step,
    batch_loss,
    cross_entropy,
    gradient,
    load_model,
    predict,
    save_model,
    softmax,
    train,
)
from .dataset import (
    DatasetManifest,
    ManifestRecord,
    ResampleSpec,
    load_manifest,
    resample,
    save_manifest,
)
from .hog import HogParams, hog_extract
from .imaging import CanonicalImage, load_image, rescale_pad, save_png
from .lbp import PRESETS as LBP_PRESETS
from .lbp import LbpParams, lbp_code, lbp_extract
from .metrics import EvaluationReport, confusion, report
from .store import (
    FeatureMatrix,
    read_store,
    validate_against_manifest,
    write_store,
)

__version__ = "0.1.0"
