import json

import numpy as np
import pytest

from octbench import load_manifest, read_store
from octbench.cli import main
from octbench.imaging import load_image
from octbench.metrics import load_report
from conftest import write_corpus


@pytest.fixture()
def pipeline_dir(tmp_path, corpus_root):
    """Run scan + split once; many tests build on the resulting manifests."""
    manifest = tmp_path / "manifest.csv"
    split = tmp_path / "split.csv"
    assert main(["scan", "--root", str(corpus_root), "--out", str(manifest)]) == 0
    assert main(["split", "--manifest", str(manifest), "--out", str(split),
                 "--train-frac", "0.5", "--val-frac", "0.25", "--seed", "7"]) == 0
    return {"root": corpus_root, "manifest": manifest, "split": split, "dir": tmp_path}


class TestScan:
    def test_manifest_contents(self, pipeline_dir):
        m = load_manifest(pipeline_dir["manifest"])
        assert m.classes == ["CNV", "DME", "DRUSEN", "NORMAL"]
        assert len(m.split_records("train")) == 4 * 14
        assert len(m.split_records("test")) == 4 * 6

    def test_unknown_split_skipped_with_warning(self, tmp_path, capsys):
        write_corpus(tmp_path, {"train": 1})
        (tmp_path / "bogus" / "CNV").mkdir(parents=True)
        out = tmp_path / "m.csv"
        assert main(["scan", "--root", str(tmp_path), "--out", str(out)]) == 0
        assert "bogus" in capsys.readouterr().err
        assert len(load_manifest(out).records) == 4

    def test_empty_root_is_data_error(self, tmp_path):
        (tmp_path / "train").mkdir()
        assert main(["scan", "--root", str(tmp_path), "--out",
                     str(tmp_path / "m.csv")]) == 2

    def test_missing_root_is_io_error(self, tmp_path):
        assert main(["scan", "--root", str(tmp_path / "nope"), "--out",
                     str(tmp_path / "m.csv")]) == 3


class TestSplit:
    def test_stratified_counts(self, pipeline_dir):
        m = load_manifest(pipeline_dir["split"])
        counts = m.counts()
        for cls in m.classes:
            assert counts[cls]["train"] == 7   # floor(0.5 * 14)
            assert counts[cls]["val"] == 3     # floor(0.25 * 14)
            assert counts[cls]["test"] == 6


class TestExtract:
    def test_hog_store(self, pipeline_dir):
        out = pipeline_dir["dir"] / "train_hog.octf"
        assert main(["extract", "--manifest", str(pipeline_dir["split"]),
                     "--root", str(pipeline_dir["root"]), "--split", "train",
                     "--method", "hog", "--out", str(out)]) == 0
        m = read_store(out)
        assert m.dim == 5408
        assert m.n_rows == 28
        assert m.record_ids == sorted(m.record_ids)

    def test_lbp_preset_store(self, pipeline_dir):
        out = pipeline_dir["dir"] / "train_lbp.octf"
        assert main(["extract", "--manifest", str(pipeline_dir["split"]),
                     "--root", str(pipeline_dir["root"]), "--split", "train",
                     "--method", "lbp", "--preset", "paper-dim",
                     "--out", str(out)]) == 0
        assert read_store(out).dim == 1960

    def test_external_method_rejected(self, pipeline_dir):
        assert main(["extract", "--manifest", str(pipeline_dir["split"]),
                     "--root", str(pipeline_dir["root"]), "--split", "train",
                     "--method", "external",
                     "--out", str(pipeline_dir["dir"] / "x.octf")]) == 2

    def test_unreadable_image_aborts_without_store(self, tmp_path, capsys):
        write_corpus(tmp_path / "data", {"train": 2})
        broken = tmp_path / "data" / "train" / "CNV" / "cnv_000.png"
        broken.write_bytes(b"not an image")
        manifest = tmp_path / "m.csv"
        assert main(["scan", "--root", str(tmp_path / "data"),
                     "--out", str(manifest)]) == 0
        out = tmp_path / "s.octf"
        assert main(["extract", "--manifest", str(manifest),
                     "--root", str(tmp_path / "data"), "--split", "train",
                     "--method", "hog", "--out", str(out)]) == 2
        assert "cnv_000.png" in capsys.readouterr().err
        assert not out.exists()


class TestTrainEvalReport:
    def test_full_pipeline(self, pipeline_dir):
        d = pipeline_dir["dir"]
        stores = {}
        for split in ("train", "val", "test"):
            stores[split] = d / f"{split}.octf"
            assert main(["extract", "--manifest", str(pipeline_dir["split"]),
                         "--root", str(pipeline_dir["root"]), "--split", split,
                         "--method", "hog", "--out", str(stores[split])]) == 0

        model = d / "hog.octm"
        history = d / "history.csv"
        assert main(["train", "--train-store", str(stores["train"]),
                     "--val-store", str(stores["val"]), "--epochs", "8",
                     "--lr", "0.01", "--seed", "3",
                     "--out-model", str(model), "--out-history", str(history)]) == 0
        assert history.exists()
        assert history.with_suffix(".png").stat().st_size > 0
        lines = history.read_text().splitlines()
        assert len(lines) == 9
        assert lines[0] == "epoch,train_acc,train_loss,val_acc,val_loss"

        rep_path = d / "hog.json"
        rep_csv = d / "hog.csv"
        assert main(["eval", "--model", str(model), "--store", str(stores["test"]),
                     "--out", str(rep_path), "--out-csv", str(rep_csv),
                     "--source", "hog"]) == 0
        rep = load_report(rep_path)
        assert rep.metadata["source"] == "hog"
        assert len(rep.metadata["model_sha256"]) == 64
        assert rep.confusion.sum() == 24
        # stripes per class are easy for HOG + a linear model
        assert rep.accuracy > 0.25
        csv_lines = rep_csv.read_text().splitlines()
        assert csv_lines[0] == "class,precision,recall,f1,support"
        assert len(csv_lines) == 6  # 4 classes + macro

        out_dir = d / "cmp"
        assert main(["report", "--out", str(out_dir), str(rep_path),
                     str(rep_path)]) == 0
        recall_lines = (out_dir / "recall_comparison.csv").read_text().splitlines()
        assert len(recall_lines) == 1 + 4 * 2
        assert (out_dir / "accuracy_comparison.csv").exists()
        assert (out_dir / "recall_comparison.png").stat().st_size > 0
        assert (out_dir / "accuracy_comparison.png").stat().st_size > 0

    def test_validate_command(self, pipeline_dir):
        d = pipeline_dir["dir"]
        store_path = d / "val_check.octf"
        assert main(["extract", "--manifest", str(pipeline_dir["split"]),
                     "--root", str(pipeline_dir["root"]), "--split", "test",
                     "--method", "lbp", "--out", str(store_path)]) == 0
        assert main(["validate", "--store", str(store_path),
                     "--manifest", str(pipeline_dir["split"]),
                     "--split", "test"]) == 0
        # against the wrong split everything is missing/unexpected
        assert main(["validate", "--store", str(store_path),
                     "--manifest", str(pipeline_dir["split"]),
                     "--split", "train"]) == 2


class TestPreprocess:
    def test_writes_canonical_pngs(self, pipeline_dir, tmp_path):
        out_root = tmp_path / "prep"
        assert main(["preprocess", "--manifest", str(pipeline_dir["split"]),
                     "--root", str(pipeline_dir["root"]),
                     "--out", str(out_root), "--split", "test"]) == 0
        m = load_manifest(pipeline_dir["split"])
        recs = m.split_records("test")
        assert len(recs) == 24
        img = load_image(out_root / recs[0].record_id)
        assert img.shape == (224, 224)


class TestErrorsAndConfig:
    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as e:
            main(["extract", "--method", "bogus"])
        assert e.value.code == 1

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as e:
            main(["frobnicate"])
        assert e.value.code == 1

    def test_missing_manifest_is_io_error(self, tmp_path):
        assert main(["split", "--manifest", str(tmp_path / "none.csv"),
                     "--out", str(tmp_path / "o.csv")]) == 3

    def test_config_file_defaults_and_flag_override(self, pipeline_dir, tmp_path):
        d = pipeline_dir["dir"]
        store_path = d / "cfg_train.octf"
        assert main(["extract", "--manifest", str(pipeline_dir["split"]),
                     "--root", str(pipeline_dir["root"]), "--split", "train",
                     "--method", "hog", "--out", str(store_path)]) == 0
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"epochs": 2, "lr": 0.01, "seed": 5}))
        h1 = tmp_path / "h1.csv"
        assert main(["train", "--train-store", str(store_path),
                     "--config", str(cfg),
                     "--out-model", str(tmp_path / "m1.octm"),
                     "--out-history", str(h1)]) == 0
        assert len(h1.read_text().splitlines()) == 3  # header + 2 epochs from config

        h2 = tmp_path / "h2.csv"
        assert main(["train", "--train-store", str(store_path),
                     "--config", str(cfg), "--epochs", "4",
                     "--out-model", str(tmp_path / "m2.octm"),
                     "--out-history", str(h2)]) == 0
        assert len(h2.read_text().splitlines()) == 5  # flag overrides config

    def test_eval_class_table_mismatch(self, pipeline_dir, tmp_path):
        import octbench
        d = pipeline_dir["dir"]
        store_path = d / "mismatch.octf"
        assert main(["extract", "--manifest", str(pipeline_dir["split"]),
                     "--root", str(pipeline_dir["root"]), "--split", "test",
                     "--method", "hog", "--out", str(store_path)]) == 0
        model = octbench.ClassifierModel(weights=np.zeros((2, 5408)),
                                         bias=np.zeros(2), classes=["a", "b"])
        mp = tmp_path / "wrong.octm"
        octbench.save_model(model, mp)
        assert main(["eval", "--model", str(mp), "--store", str(store_path)]) == 2
