"""Matplotlib renderings of the benchmark outputs (written next to the CSVs)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .classifier import TrainHistory
from .metrics import EvaluationReport, _method_name


def save_training_curves(history: TrainHistory, path, title: str = "") -> None:
    """Accuracy and loss per epoch, train vs validation."""
    epochs = np.arange(1, len(history) + 1)
    fig, (ax_acc, ax_loss) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_acc.plot(epochs, history.train_accuracy, color="gray", label="train")
    ax_loss.plot(epochs, history.train_loss, color="gray", label="train")
    if history.has_val:
        ax_acc.plot(epochs, history.val_accuracy, "k--", label="validation")
        ax_loss.plot(epochs, history.val_loss, "k--", label="validation")
    ax_acc.set_xlabel("epoch")
    ax_acc.set_ylabel("accuracy")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("loss")
    ax_acc.legend()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_recall_comparison(reports: list[EvaluationReport], path) -> None:
    """Grouped bars: per-class recall for each method."""
    classes = reports[0].classes
    n_methods = len(reports)
    x = np.arange(len(classes), dtype=np.float64)
    width = 0.8 / n_methods
    fig, ax = plt.subplots(figsize=(7, 4))
    for j, rep in enumerate(reports):
        offset = (j - (n_methods - 1) / 2) * width
        ax.bar(x + offset, rep.recall, width, label=_method_name(rep, j))
    ax.set_xticks(x)
    ax.set_xticklabels(classes)
    ax.set_ylabel("recall")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_accuracy_comparison(reports: list[EvaluationReport], path) -> None:
    """Test accuracy per method."""
    names = [_method_name(rep, j) for j, rep in enumerate(reports)]
    accs = [rep.accuracy for rep in reports]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(names, accs, color="gray")
    for i, a in enumerate(accs):
        ax.text(i, a + 0.01, f"{a:.3f}", ha="center", fontsize=9)
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0, 1.05)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
