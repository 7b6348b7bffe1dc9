"""Confusion-matrix evaluation: per-class precision/recall/F1 and accuracy.

Zero-denominator metrics are defined as 0 and "average" rows are macro
(unweighted) means; on a class-balanced test set macro and support-weighted
averages coincide anyway.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classifier import TrainHistory
from .errors import EmptyMatrixError, LabelOutOfRangeError, LengthMismatchError


def confusion(true_labels, predicted_labels, n_classes: int) -> np.ndarray:
    """K x K count matrix; entry (t, p) = examples of true class t predicted p."""
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape:
        raise LengthMismatchError(f"{t.shape[0]} true vs {p.shape[0]} predicted labels")
    if t.size and (min(t.min(), p.min()) < 0 or max(t.max(), p.max()) >= n_classes):
        raise LabelOutOfRangeError(f"labels must be in [0, {n_classes})")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (t, p), 1)
    return cm


@dataclass
class EvaluationReport:
    classes: list[str]
    confusion: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "classes": self.classes,
            "confusion": self.confusion.tolist(),
            "per_class": [
                {"class": c, "precision": float(self.precision[i]),
                 "recall": float(self.recall[i]), "f1": float(self.f1[i]),
                 "support": int(self.support[i])}
                for i, c in enumerate(self.classes)
            ],
            "macro": {"precision": self.macro_precision, "recall": self.macro_recall,
                      "f1": self.macro_f1},
            "accuracy": self.accuracy,
            "metadata": self.metadata,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "EvaluationReport":
        per = d["per_class"]
        return cls(
            classes=list(d["classes"]),
            confusion=np.asarray(d["confusion"], dtype=np.int64),
            precision=np.array([r["precision"] for r in per]),
            recall=np.array([r["recall"] for r in per]),
            f1=np.array([r["f1"] for r in per]),
            support=np.array([r["support"] for r in per], dtype=np.int64),
            macro_precision=d["macro"]["precision"],
            macro_recall=d["macro"]["recall"],
            macro_f1=d["macro"]["f1"],
            accuracy=d["accuracy"],
            metadata=dict(d.get("metadata", {})),
        )

    def to_text(self) -> str:
        width = max([len(c) for c in self.classes] + [7])
        lines = [f"{'':{width}}  precision  recall  f1-score  support"]
        for i, c in enumerate(self.classes):
            lines.append(f"{c:{width}}  {self.precision[i]:9.4f}  {self.recall[i]:6.4f}"
                         f"  {self.f1[i]:8.4f}  {self.support[i]:7d}")
        lines.append(f"{'macro':{width}}  {self.macro_precision:9.4f}  {self.macro_recall:6.4f}"
                     f"  {self.macro_f1:8.4f}  {int(self.support.sum()):7d}")
        lines.append(f"accuracy: {self.accuracy:.7f}")
        if self.metadata:
            meta = ", ".join(f"{k}={v}" for k, v in sorted(self.metadata.items()))
            lines.append(f"({meta})")
        return "\n".join(lines)


def save_report(rep: EvaluationReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(rep.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report(path) -> EvaluationReport:
    with open(path, "r", encoding="utf-8") as fh:
        return EvaluationReport.from_json_dict(json.load(fh))


def save_report_csv(rep: EvaluationReport, path) -> None:
    """Per-class metrics CSV: class,precision,recall,f1,support plus a final
    macro row carrying the total support."""
    lines = ["class,precision,recall,f1,support"]
    for i, c in enumerate(rep.classes):
        lines.append(f"{c},{repr(float(rep.precision[i]))},{repr(float(rep.recall[i]))},"
                     f"{repr(float(rep.f1[i]))},{int(rep.support[i])}")
    lines.append(f"macro,{repr(rep.macro_precision)},{repr(rep.macro_recall)},"
                 f"{repr(rep.macro_f1)},{int(rep.support.sum())}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def report(cm: np.ndarray, classes: list[str], metadata: dict | None = None) -> EvaluationReport:
    """Derive per-class and macro metrics from a confusion matrix.

    precision_k = TP/(TP+FP), recall_k = TP/(TP+FN), F1 = 2PR/(P+R), each
    0 when its denominator is 0; accuracy = trace/total.
    """
    cm = np.asarray(cm, dtype=np.int64)
    total = int(cm.sum())
    if total == 0:
        raise EmptyMatrixError("confusion matrix has no entries")
    tp = np.diag(cm).astype(np.float64)
    predicted = cm.sum(axis=0).astype(np.float64)  # TP + FP
    actual = cm.sum(axis=1).astype(np.float64)     # TP + FN

    with np.errstate(invalid="ignore"):
        precision = np.where(predicted > 0, tp / np.where(predicted > 0, predicted, 1), 0.0)
        recall = np.where(actual > 0, tp / np.where(actual > 0, actual, 1), 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1), 0.0)

    return EvaluationReport(
        classes=list(classes),
        confusion=cm,
        precision=precision,
        recall=recall,
        f1=f1,
        support=cm.sum(axis=1),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        accuracy=float(tp.sum() / total),
        metadata=dict(metadata or {}),
    )


def emit_curves(history: TrainHistory, path) -> None:
    """Per-epoch metrics CSV: epoch,train_acc,train_loss[,val_acc,val_loss]."""
    cols = ["epoch", "train_acc", "train_loss"]
    if history.has_val:
        cols += ["val_acc", "val_loss"]
    lines = [",".join(cols)]
    for i in range(len(history)):
        row = [str(i + 1), repr(history.train_accuracy[i]), repr(history.train_loss[i])]
        if history.has_val:
            row += [repr(history.val_accuracy[i]), repr(history.val_loss[i])]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _method_name(rep: EvaluationReport, index: int) -> str:
    return str(rep.metadata.get("source") or f"method{index}")


def emit_recall_comparison(reports: list[EvaluationReport], path) -> None:
    """Recall of every class under every method: CSV `class,method,recall`."""
    if not reports:
        raise EmptyMatrixError("no reports to compare")
    classes = reports[0].classes
    for rep in reports[1:]:
        if rep.classes != classes:
            raise LengthMismatchError("reports have differing class lists")
    lines = ["class,method,recall"]
    for i, cls in enumerate(classes):
        for j, rep in enumerate(reports):
            lines.append(f"{cls},{_method_name(rep, j)},{repr(float(rep.recall[i]))}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_accuracy_comparison(reports: list[EvaluationReport], path) -> None:
    """Test accuracy per method: CSV `method,accuracy`."""
    if not reports:
        raise EmptyMatrixError("no reports to compare")
    lines = ["method,accuracy"]
    for j, rep in enumerate(reports):
        lines.append(f"{_method_name(rep, j)},{repr(float(rep.accuracy))}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
