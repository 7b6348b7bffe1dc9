import numpy as np
import pytest

from octbench.classifier import TrainHistory
from octbench.errors import (
    EmptyMatrixError,
    LabelOutOfRangeError,
    LengthMismatchError,
)
from octbench.metrics import (
    EvaluationReport,
    confusion,
    emit_accuracy_comparison,
    emit_curves,
    emit_recall_comparison,
    load_report,
    report,
    save_report,
)

CLASSES = ["CNV", "DME", "DRUSEN", "NORMAL"]


class TestConfusion:
    def test_perfect_predictions_diagonal(self):
        cm = confusion([0, 1, 2, 3, 1], [0, 1, 2, 3, 1], 4)
        assert np.array_equal(cm, np.diag([1, 2, 1, 1]))

    def test_all_predicted_class_zero(self):
        cm = confusion([0, 1, 2, 3], [0, 0, 0, 0], 4)
        assert np.all(cm[:, 1:] == 0)
        assert np.array_equal(cm[:, 0], [1, 1, 1, 1])

    def test_hand_counted(self):
        cm = confusion([0, 1, 1], [0, 0, 1], 2)
        assert cm[0, 0] == 1 and cm[1, 0] == 1 and cm[1, 1] == 1 and cm[0, 1] == 0

    def test_total_preserved(self):
        rng = np.random.default_rng(0)
        t = rng.integers(0, 4, size=100)
        p = rng.integers(0, 4, size=100)
        assert confusion(t, p, 4).sum() == 100

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            confusion([0, 1], [0], 2)

    def test_label_out_of_range(self):
        with pytest.raises(LabelOutOfRangeError):
            confusion([0, 5], [0, 1], 4)
        with pytest.raises(LabelOutOfRangeError):
            confusion([0, -1], [0, 1], 4)


class TestReport:
    def test_hand_computed_two_class(self):
        rep = report(np.array([[2, 0], [1, 1]]), ["a", "b"])
        assert rep.precision[0] == pytest.approx(2 / 3, abs=1e-12)
        assert rep.recall[0] == pytest.approx(1.0, abs=1e-12)
        assert rep.f1[0] == pytest.approx(0.8, abs=1e-12)
        assert rep.precision[1] == pytest.approx(1.0, abs=1e-12)
        assert rep.recall[1] == pytest.approx(0.5, abs=1e-12)
        assert rep.f1[1] == pytest.approx(2 / 3, abs=1e-12)
        assert rep.accuracy == pytest.approx(0.75, abs=1e-12)

    def test_balanced_single_class_predictor(self):
        # 4 classes x 10 examples each, everything predicted class 0
        cm = np.zeros((4, 4), dtype=int)
        cm[:, 0] = 10
        rep = report(cm, CLASSES)
        assert rep.accuracy == 0.25
        # unpredicted classes get 0 across the board, like the published
        # LBP rows for DME/DRUSEN
        for k in (1, 2, 3):
            assert rep.precision[k] == 0.0
            assert rep.recall[k] == 0.0
            assert rep.f1[k] == 0.0

    def test_macro_equals_weighted_when_balanced(self):
        rng = np.random.default_rng(1)
        t = np.repeat(np.arange(4), 50)
        p = rng.integers(0, 4, size=200)
        rep = report(confusion(t, p, 4), CLASSES)
        weighted_recall = float((rep.recall * rep.support).sum() / rep.support.sum())
        assert rep.macro_recall == pytest.approx(weighted_recall, abs=1e-12)

    def test_accuracy_is_support_weighted_recall(self):
        rng = np.random.default_rng(2)
        t = rng.integers(0, 4, size=300)
        p = rng.integers(0, 4, size=300)
        rep = report(confusion(t, p, 4), CLASSES)
        assert rep.accuracy == pytest.approx(
            float((rep.recall * rep.support).sum() / rep.support.sum()), abs=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        t = rng.integers(0, 4, size=200)
        p = rng.integers(0, 4, size=200)
        perm = np.array([2, 0, 3, 1])
        rep1 = report(confusion(t, p, 4), CLASSES)
        rep2 = report(confusion(perm[t], perm[p], 4),
                      [CLASSES[i] for i in np.argsort(perm)])
        assert rep1.accuracy == rep2.accuracy
        inv = np.argsort(perm)
        for k in range(4):
            assert rep1.precision[k] == pytest.approx(rep2.precision[perm[k]], abs=1e-12)
            assert rep1.recall[k] == pytest.approx(rep2.recall[perm[k]], abs=1e-12)
        assert rep1.macro_f1 == pytest.approx(rep2.macro_f1, abs=1e-12)
        assert inv is not None

    def test_metrics_in_unit_range(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            t = rng.integers(0, 4, size=50)
            p = rng.integers(0, 4, size=50)
            rep = report(confusion(t, p, 4), CLASSES)
            for arr in (rep.precision, rep.recall, rep.f1):
                assert np.all(arr >= 0.0) and np.all(arr <= 1.0)
            assert 0.0 <= rep.accuracy <= 1.0

    def test_empty_matrix(self):
        with pytest.raises(EmptyMatrixError):
            report(np.zeros((4, 4), dtype=int), CLASSES)

    def test_json_roundtrip(self, tmp_path):
        rep = report(np.array([[5, 1], [2, 3]]), ["x", "y"], metadata={"source": "hog"})
        p = tmp_path / "rep.json"
        save_report(rep, p)
        back = load_report(p)
        assert back.accuracy == rep.accuracy
        assert np.array_equal(back.confusion, rep.confusion)
        assert back.metadata == {"source": "hog"}

    def test_text_table(self):
        rep = report(np.array([[5, 1], [2, 3]]), ["x", "y"], metadata={"source": "hog"})
        text = rep.to_text()
        assert "precision" in text and "accuracy" in text and "hog" in text

    def test_csv_serialization(self, tmp_path):
        from octbench.metrics import save_report_csv
        rep = report(np.array([[2, 0], [1, 1]]), ["a", "b"])
        p = tmp_path / "rep.csv"
        save_report_csv(rep, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "class,precision,recall,f1,support"
        assert len(lines) == 4  # 2 classes + macro row
        assert lines[1].startswith("a,") and lines[3].startswith("macro,")


def _history(epochs, with_val=True):
    h = TrainHistory(val_accuracy=[] if with_val else None,
                     val_loss=[] if with_val else None)
    for i in range(epochs):
        h.train_accuracy.append(0.5 + 0.01 * i)
        h.train_loss.append(1.0 / (i + 1))
        if with_val:
            h.val_accuracy.append(0.4 + 0.01 * i)
            h.val_loss.append(1.2 / (i + 1))
    return h


class TestEmitters:
    def test_curves_single_epoch(self, tmp_path):
        p = tmp_path / "h.csv"
        emit_curves(_history(1), p)
        lines = p.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0] == "epoch,train_acc,train_loss,val_acc,val_loss"

    def test_curves_without_val(self, tmp_path):
        p = tmp_path / "h.csv"
        emit_curves(_history(3, with_val=False), p)
        lines = p.read_text().splitlines()
        assert lines[0] == "epoch,train_acc,train_loss"
        assert len(lines) == 4

    def _reports(self, n=4):
        reports = []
        rng = np.random.default_rng(5)
        for j in range(n):
            t = np.repeat(np.arange(4), 10)
            p = rng.integers(0, 4, size=40)
            reports.append(report(confusion(t, p, 4), CLASSES,
                                  metadata={"source": f"m{j}"}))
        return reports

    def test_recall_comparison_line_count(self, tmp_path):
        p = tmp_path / "recall.csv"
        emit_recall_comparison(self._reports(4), p)
        lines = p.read_text().splitlines()
        assert len(lines) == 17  # header + 4 classes x 4 methods
        assert lines[0] == "class,method,recall"

    def test_recall_of_perfect_report(self, tmp_path):
        rep = report(np.diag([10, 10, 10, 10]), CLASSES, metadata={"source": "hog"})
        p = tmp_path / "recall.csv"
        emit_recall_comparison([rep], p)
        for line in p.read_text().splitlines()[1:]:
            assert line.endswith("1.0")

    def test_accuracy_comparison(self, tmp_path):
        p = tmp_path / "acc.csv"
        emit_accuracy_comparison(self._reports(2), p)
        lines = p.read_text().splitlines()
        assert lines[0] == "method,accuracy"
        assert len(lines) == 3

    def test_mismatched_classes_rejected(self, tmp_path):
        r1 = report(np.diag([1, 1]), ["a", "b"])
        r2 = report(np.diag([1, 1]), ["a", "c"])
        with pytest.raises(LengthMismatchError):
            emit_recall_comparison([r1, r2], tmp_path / "x.csv")

    def test_empty_report_list(self, tmp_path):
        with pytest.raises(EmptyMatrixError):
            emit_recall_comparison([], tmp_path / "x.csv")


def test_plots_render(tmp_path):
    from octbench.plots import (
        save_accuracy_comparison,
        save_recall_comparison,
        save_training_curves,
    )
    rng = np.random.default_rng(6)
    reports = []
    for j in range(2):
        t = np.repeat(np.arange(4), 5)
        p = rng.integers(0, 4, size=20)
        reports.append(report(confusion(t, p, 4), CLASSES, metadata={"source": f"m{j}"}))
    save_training_curves(_history(5), tmp_path / "curves.png")
    save_recall_comparison(reports, tmp_path / "recall.png")
    save_accuracy_comparison(reports, tmp_path / "acc.png")
    for name in ("curves.png", "recall.png", "acc.png"):
        assert (tmp_path / name).stat().st_size > 0


def test_report_type_checks():
    assert isinstance(report(np.eye(2, dtype=int), ["a", "b"]), EvaluationReport)
