"""K-class softmax regression trained with Adam on categorical cross-entropy.

This is the linear benchmark classifier: one weight row per class,
softmax activation, no hidden layer and no regularization. Weights
start at zero (the objective is convex, so initialization only affects
the optimization path) and training is a deterministic function of the
data and the config, including the shuffle seed.

Model file layout (little-endian):

    magic b"OCTM" | version u16 = 1 | K u16 | D u32
    class table: per class, name_len u16 + UTF-8 bytes
    K * D f32 weights row-major, then K f32 biases
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimMismatchError,
    EmptyTrainingSetError,
    MagicMismatchError,
    TruncatedFileError,
    VersionUnsupportedError,
)
from .store import FeatureMatrix

MODEL_MAGIC = b"OCTM"
MODEL_VERSION = 1

LOSS_CLAMP = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1/beta2 must be in [0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class ClassifierModel:
    """Weight matrix (K x D, float32) and bias vector (K) plus class names."""

    weights: np.ndarray
    bias: np.ndarray
    classes: list[str]

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float32)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float32)
        k = len(self.classes)
        if self.weights.ndim != 2 or self.weights.shape[0] != k or self.bias.shape != (k,):
            raise DimMismatchError(
                f"weights {self.weights.shape} / bias {self.bias.shape} "
                f"inconsistent with {k} classes")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("model parameters must be finite")

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassifierModel):
            return NotImplemented
        return (self.classes == other.classes
                and self.weights.shape == other.weights.shape
                and self.weights.tobytes() == other.weights.tobytes()
                and self.bias.tobytes() == other.bias.tobytes())


@dataclass
class TrainHistory:
    """Per-epoch metrics on the full train and (optional) validation sets."""

    train_accuracy: list[float] = field(default_factory=list)
    train_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] | None = None
    val_loss: list[float] | None = None

    @property
    def has_val(self) -> bool:
        return self.val_accuracy is not None

    def __len__(self) -> int:
        return len(self.train_accuracy)


@dataclass
class AdamState:
    """Bias-corrected first/second moment accumulators, one per parameter array."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params])


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, numerically stable via max subtraction."""
    logits = np.asarray(logits, dtype=np.float64)
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, label: int) -> float:
    """Negative log-probability of the true class, clamped at 1e-12."""
    return float(-np.log(max(float(probs[label]), LOSS_CLAMP)))


def _forward(weights: np.ndarray, bias: np.ndarray, x: np.ndarray) -> np.ndarray:
    return softmax(x @ weights.T + bias)


def batch_loss(weights: np.ndarray, bias: np.ndarray, x: np.ndarray,
               labels: np.ndarray) -> float:
    """Mean categorical cross-entropy over a batch."""
    probs = _forward(weights, bias, x)
    p_true = probs[np.arange(len(labels)), labels]
    return float(-np.log(np.maximum(p_true, LOSS_CLAMP)).mean())


def gradient(weights: np.ndarray, bias: np.ndarray, x: np.ndarray,
             labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean gradient of the cross-entropy loss over the batch.

    dW row k = (1/B) sum_i (p_ik - y_ik) x_i, db_k = (1/B) sum_i (p_ik - y_ik).
    """
    if x.shape[0] == 0:
        raise EmptyTrainingSetError("gradient over an empty batch")
    if x.shape[1] != weights.shape[1]:
        raise DimMismatchError(f"features dim {x.shape[1]} != model dim {weights.shape[1]}")
    probs = _forward(weights, bias, x)
    delta = probs
    delta[np.arange(len(labels)), labels] -= 1.0
    delta /= x.shape[0]
    return delta.T @ x, delta.sum(axis=0)


def adam_step(params: list[np.ndarray], grads: list[np.ndarray], state: AdamState,
              cfg: TrainConfig) -> tuple[list[np.ndarray], AdamState]:
    """One Adam update; returns new parameter arrays and the advanced state."""
    t = state.t + 1
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g
        m_hat = m / (1.0 - cfg.beta1 ** t)
        v_hat = v / (1.0 - cfg.beta2 ** t)
        new_params.append(p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(m=new_m, v=new_v, t=t)


def _accuracy(weights, bias, x, labels) -> float:
    pred = np.argmax(x @ weights.T + bias, axis=1)
    return float(np.mean(pred == labels))


def train(train_set: FeatureMatrix, val_set: FeatureMatrix | None,
          cfg: TrainConfig = TrainConfig()) -> tuple[ClassifierModel, TrainHistory]:
    """Mini-batch Adam training from zero-initialized weights.

    Rows are reshuffled every epoch with a generator seeded from
    cfg.shuffle_seed; the final partial batch is included. Epoch-end
    metrics are evaluated on the full train set and, when given a nonempty
    val_set, the full validation set.
    """
    if train_set.n_rows == 0:
        raise EmptyTrainingSetError("training set has no rows")
    x = train_set.values.astype(np.float64)
    y = train_set.labels
    k = len(train_set.classes)
    d = train_set.dim

    has_val = val_set is not None and val_set.n_rows > 0
    if has_val:
        if val_set.dim != d:
            raise DimMismatchError(f"val dim {val_set.dim} != train dim {d}")
        if val_set.classes != train_set.classes:
            raise DimMismatchError("val class table differs from train class table")
        xv = val_set.values.astype(np.float64)
        yv = val_set.labels

    weights = np.zeros((k, d))
    bias = np.zeros(k)
    state = AdamState.zeros_like([weights, bias])
    rng = np.random.default_rng(cfg.shuffle_seed & 0xFFFFFFFFFFFFFFFF)
    history = TrainHistory(val_accuracy=[] if has_val else None,
                           val_loss=[] if has_val else None)

    for _ in range(cfg.epochs):
        order = rng.permutation(train_set.n_rows)
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            dw, db = gradient(weights, bias, x[idx], y[idx])
            (weights, bias), state = adam_step([weights, bias], [dw, db], state, cfg)
        history.train_accuracy.append(_accuracy(weights, bias, x, y))
        history.train_loss.append(batch_loss(weights, bias, x, y))
        if has_val:
            history.val_accuracy.append(_accuracy(weights, bias, xv, yv))
            history.val_loss.append(batch_loss(weights, bias, xv, yv))

    model = ClassifierModel(weights=weights, bias=bias, classes=list(train_set.classes))
    return model, history


def predict(model: ClassifierModel, features: FeatureMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Predicted class index (argmax, ties to the lowest index) and the full
    probability matrix for every row."""
    if features.dim != model.feature_dim:
        raise DimMismatchError(
            f"features dim {features.dim} != model dim {model.feature_dim}")
    x = features.values.astype(np.float64)
    probs = _forward(model.weights.astype(np.float64), model.bias.astype(np.float64), x)
    return np.argmax(probs, axis=1), probs


def save_model(model: ClassifierModel, path) -> None:
    names = [c.encode("utf-8") for c in model.classes]
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<HHI", MODEL_VERSION, model.n_classes, model.feature_dim))
        for name in names:
            fh.write(struct.pack("<H", len(name)))
            fh.write(name)
        fh.write(model.weights.tobytes())
        fh.write(model.bias.tobytes())


def load_model(path) -> ClassifierModel:
    with open(path, "rb") as fh:
        data = fh.read()

    def need(pos, n, what):
        if pos + n > len(data):
            raise TruncatedFileError(f"model file ends inside {what}")
        return data[pos:pos + n], pos + n

    chunk, pos = need(0, 4, "magic")
    if chunk != MODEL_MAGIC:
        raise MagicMismatchError(f"bad magic {chunk!r}, expected {MODEL_MAGIC!r}")
    chunk, pos = need(pos, 8, "header")
    version, k, d = struct.unpack("<HHI", chunk)
    if version != MODEL_VERSION:
        raise VersionUnsupportedError(f"unsupported model version {version}")
    classes = []
    for _ in range(k):
        chunk, pos = need(pos, 2, "class table")
        (name_len,) = struct.unpack("<H", chunk)
        chunk, pos = need(pos, name_len, "class table")
        classes.append(chunk.decode("utf-8"))
    chunk, pos = need(pos, 4 * k * d, "weights")
    weights = np.frombuffer(chunk, dtype="<f4").reshape(k, d)
    chunk, pos = need(pos, 4 * k, "biases")
    bias = np.frombuffer(chunk, dtype="<f4")
    if pos != len(data):
        raise TruncatedFileError(f"{len(data) - pos} trailing bytes in model file")
    return ClassifierModel(weights=weights.copy(), bias=bias.copy(), classes=classes)


