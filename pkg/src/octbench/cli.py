"""Command-line pipeline: scan -> split -> extract -> train -> eval -> report.

Every stage reads and writes explicit files, so runs are resumable and
cacheable; all randomness flows from --seed flags. Exit codes: 0 success,
1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import classifier, dataset, hog, imaging, lbp, metrics, store
from .errors import (
    EmptyDatasetError,
    ExternalNotExtractableError,
    OctbenchError,
)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    # spec'd exit codes: usage errors are 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise OctbenchError(f"config file {path} must hold a JSON object")
    return cfg


class _Options:
    """Flag value > config-file value > hard default."""

    def __init__(self, args):
        self.args = args
        self.config = _load_config(getattr(args, "config", None))

    def get(self, key, default=None):
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if key in self.config:
            return self.config[key]
        return default


def _require_file(path, what):
    if not Path(path).is_file():
        raise FileNotFoundError(f"{what} not found: {path}")
    return Path(path)


def _canonical_pixels(path) -> np.ndarray:
    return imaging.rescale_pad(imaging.load_image(path)).pixels


# --- subcommands ---

def cmd_scan(opt: _Options) -> int:
    root = Path(opt.get("root"))
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root not found: {root}")
    records = []
    for split_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if split_dir.name not in dataset.SPLITS:
            print(f"warning: skipping unknown split directory {split_dir.name!r}",
                  file=sys.stderr)
            continue
        for class_dir in sorted(p for p in split_dir.iterdir() if p.is_dir()):
            for f in sorted(class_dir.rglob("*")):
                if f.is_file() and f.suffix.lower() in IMAGE_SUFFIXES:
                    rid = f.relative_to(root).as_posix()
                    records.append(dataset.ManifestRecord(rid, class_dir.name, split_dir.name))
    if not records:
        raise EmptyDatasetError(f"no images found under {root}")
    manifest = dataset.DatasetManifest(records=records)
    dataset.save_manifest(manifest, opt.get("out"))
    print(f"scanned {len(records)} records, {len(manifest.classes)} classes "
          f"-> {opt.get('out')}")
    return 0


def cmd_split(opt: _Options) -> int:
    manifest = dataset.load_manifest(_require_file(opt.get("manifest"), "manifest"))
    spec = dataset.ResampleSpec(
        train_fraction=float(opt.get("train_frac", 0.25)),
        val_fraction=float(opt.get("val_frac", 0.125)),
        seed=int(opt.get("seed", 0)),
    )
    resampled = dataset.resample(manifest, spec)
    dataset.save_manifest(resampled, opt.get("out"))
    counts = resampled.counts()
    for cls in resampled.classes:
        print(f"{cls}: train={counts[cls]['train']} val={counts[cls]['val']} "
              f"test={counts[cls]['test']}")
    print(f"wrote {opt.get('out')}")
    return 0


def cmd_preprocess(opt: _Options) -> int:
    manifest = dataset.load_manifest(_require_file(opt.get("manifest"), "manifest"))
    root = Path(opt.get("root"))
    out_root = Path(opt.get("out"))
    split = opt.get("split")
    records = manifest.split_records(split) if split else manifest.records
    for r in records:
        pixels = _canonical_pixels(root / r.record_id)
        target = out_root / r.record_id
        target.parent.mkdir(parents=True, exist_ok=True)
        imaging.save_png(pixels, target)
    print(f"preprocessed {len(records)} images -> {out_root} "
          "(PNG encoded regardless of suffix)")
    return 0


def _feature_params(opt: _Options):
    method = opt.get("method")
    if method == "hog":
        params = hog.HogParams(
            orientations=int(opt.get("orientations", 8)),
            cell_size=int(opt.get("cell_size", 16)),
            block_size=int(opt.get("block_size", 2)),
            block_stride=int(opt.get("block_stride", 1)),
        )
        return lambda px: hog.hog_extract(px, params)
    if method == "lbp":
        preset = opt.get("preset")
        if preset is not None:
            if preset not in lbp.PRESETS:
                raise OctbenchError(f"unknown preset {preset!r}; "
                                    f"choose from {sorted(lbp.PRESETS)}")
            params = lbp.PRESETS[preset]
        else:
            params = lbp.LbpParams(
                points=int(opt.get("points", 8)),
                radius=float(opt.get("radius", 2)),
                block=int(opt.get("block", 16)),
            )
        return lambda px: lbp.lbp_extract(px, params)
    if method == "external":
        raise ExternalNotExtractableError(
            "external feature stores are produced by the cnn export tool "
            "and only ingested here")
    raise OctbenchError(f"unknown method {method!r}")


def cmd_extract(opt: _Options) -> int:
    manifest = dataset.load_manifest(_require_file(opt.get("manifest"), "manifest"))
    root = Path(opt.get("root"))
    split = opt.get("split", "train")
    extract = _feature_params(opt)
    records = sorted(manifest.split_records(split), key=lambda r: r.record_id)
    if not records:
        raise EmptyDatasetError(f"manifest has no records in split {split!r}")

    rows, ids, labels, errors = [], [], [], []
    for r in records:
        try:
            rows.append(extract(_canonical_pixels(root / r.record_id)))
            ids.append(r.record_id)
            labels.append(manifest.label_index(r.label))
        except (OctbenchError, OSError) as exc:
            errors.append(f"{r.record_id}: {exc}")
    if errors:
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        print(f"{len(errors)} of {len(records)} records failed; store not written",
              file=sys.stderr)
        return EXIT_DATA

    matrix = store.FeatureMatrix(values=np.array(rows, dtype=np.float32),
                                 record_ids=ids,
                                 labels=np.array(labels),
                                 classes=list(manifest.classes),
                                 source=opt.get("method"))
    store.write_store(matrix, opt.get("out"))
    print(f"extracted {matrix.n_rows} rows (dim {matrix.dim}) -> {opt.get('out')}")
    return 0


def cmd_train(opt: _Options) -> int:
    train_set = store.read_store(_require_file(opt.get("train_store"), "train store"))
    val_path = opt.get("val_store")
    val_set = store.read_store(_require_file(val_path, "val store")) if val_path else None
    cfg = classifier.TrainConfig(
        epochs=int(opt.get("epochs", 100)),
        learning_rate=float(opt.get("lr", 1e-4)),
        batch_size=int(opt.get("batch_size", 32)),
        shuffle_seed=int(opt.get("seed", 0)),
    )
    model, history = classifier.train(train_set, val_set, cfg)
    classifier.save_model(model, opt.get("out_model"))
    history_path = opt.get("out_history")
    if history_path:
        metrics.emit_curves(history, history_path)
        from . import plots
        plots.save_training_curves(history, Path(history_path).with_suffix(".png"))
    if len(history):
        last = f"train_acc={history.train_accuracy[-1]:.4f}"
        if history.has_val:
            last += f" val_acc={history.val_accuracy[-1]:.4f}"
        print(f"trained {cfg.epochs} epochs: {last}")
    print(f"model -> {opt.get('out_model')}")
    return 0


def cmd_eval(opt: _Options) -> int:
    model_path = _require_file(opt.get("model"), "model")
    store_path = _require_file(opt.get("store"), "feature store")
    model = classifier.load_model(model_path)
    test_set = store.read_store(store_path)
    if test_set.classes != model.classes:
        raise OctbenchError(
            f"store classes {test_set.classes} != model classes {model.classes}")
    pred, _ = classifier.predict(model, test_set)
    cm = metrics.confusion(test_set.labels, pred, len(model.classes))
    source = opt.get("source") or Path(opt.get("store")).stem
    rep = metrics.report(cm, model.classes, metadata={
        "source": source,
        "model_sha256": hashlib.sha256(model_path.read_bytes()).hexdigest(),
        "store_sha256": hashlib.sha256(store_path.read_bytes()).hexdigest(),
    })
    out = opt.get("out")
    if out:
        metrics.save_report(rep, out)
        print(f"report -> {out}")
    out_csv = opt.get("out_csv")
    if out_csv:
        metrics.save_report_csv(rep, out_csv)
        print(f"per-class CSV -> {out_csv}")
    print(rep.to_text())
    return 0


def cmd_validate(opt: _Options) -> int:
    matrix = store.read_store(_require_file(opt.get("store"), "feature store"))
    manifest = dataset.load_manifest(_require_file(opt.get("manifest"), "manifest"))
    rep = store.validate_against_manifest(matrix, manifest, opt.get("split", "train"))
    for rid in rep.missing:
        print(f"missing from store: {rid}")
    for rid in rep.unexpected:
        print(f"unexpected in store: {rid}")
    if rep.ok:
        print("store matches manifest split")
        return 0
    print(f"{len(rep.missing)} missing, {len(rep.unexpected)} unexpected", file=sys.stderr)
    return EXIT_DATA


def cmd_report(opt: _Options) -> int:
    reports = [metrics.load_report(_require_file(p, "report")) for p in opt.get("reports")]
    out_dir = Path(opt.get("out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics.emit_recall_comparison(reports, out_dir / "recall_comparison.csv")
    metrics.emit_accuracy_comparison(reports, out_dir / "accuracy_comparison.csv")
    from . import plots
    plots.save_recall_comparison(reports, out_dir / "recall_comparison.png")
    plots.save_accuracy_comparison(reports, out_dir / "accuracy_comparison.png")
    for j, rep in enumerate(reports):
        name = rep.metadata.get("source", f"method{j}")
        print(f"{name}: accuracy {rep.accuracy:.7f}")
    print(f"comparison CSVs and figures -> {out_dir}")
    return 0


# --- argument wiring ---

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="octbench",
                     description="OCT image feature benchmarking pipeline")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", help="JSON config file; flags override its keys")
        return p

    p = add("scan", cmd_scan, "build a manifest from a <root>/<split>/<class>/ layout")
    p.add_argument("--root", required=True)
    p.add_argument("--out", required=True, help="output manifest CSV")

    p = add("split", cmd_split, "stratified resample of the train split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--train-frac", dest="train_frac", type=float,
                   help="fraction of train kept as new train (default 0.25)")
    p.add_argument("--val-frac", dest="val_frac", type=float,
                   help="fraction of train moved to new val (default 0.125)")
    p.add_argument("--seed", type=int)

    p = add("preprocess", cmd_preprocess, "write canonical 224x224 PNGs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--root", required=True)
    p.add_argument("--out", required=True, help="output root directory")
    p.add_argument("--split", help="restrict to one split (default: all records)")

    p = add("extract", cmd_extract, "preprocess + extract features for one split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--root", required=True)
    p.add_argument("--split", choices=dataset.SPLITS)
    p.add_argument("--method", choices=["hog", "lbp", "external"])
    p.add_argument("--preset", choices=sorted(lbp.PRESETS),
                   help="lbp parameter preset (default paper-dim)")
    p.add_argument("--out", required=True, help="output feature store")
    p.add_argument("--orientations", type=int)
    p.add_argument("--cell-size", dest="cell_size", type=int)
    p.add_argument("--block-size", dest="block_size", type=int)
    p.add_argument("--block-stride", dest="block_stride", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--block", type=int)

    p = add("train", cmd_train, "train the softmax-regression classifier")
    p.add_argument("--train-store", dest="train_store", required=True)
    p.add_argument("--val-store", dest="val_store")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--seed", type=int, help="shuffle seed")
    p.add_argument("--out-model", dest="out_model", required=True)
    p.add_argument("--out-history", dest="out_history",
                   help="per-epoch metrics CSV (a .png with the curves is "
                        "rendered next to it)")

    p = add("eval", cmd_eval, "evaluate a model on a feature store")
    p.add_argument("--model", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--out", help="report JSON path (per_class entries carry "
                                 "precision/recall/f1/support; metadata carries "
                                 "source and artifact sha256 hashes)")
    p.add_argument("--out-csv", dest="out_csv",
                   help="per-class metrics CSV "
                        "(columns: class,precision,recall,f1,support)")
    p.add_argument("--source", help="method name recorded in the report "
                                    "(default: store filename stem)")

    p = add("validate", cmd_validate, "check a store against a manifest split")
    p.add_argument("--store", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", choices=dataset.SPLITS)

    p = add("report", cmd_report, "cross-method comparison CSVs and figures")
    p.add_argument("reports", nargs="+", help="evaluation report JSON files")
    p.add_argument("--out", required=True,
                   help="output directory for recall_comparison.csv "
                        "(columns: class,method,recall), accuracy_comparison.csv "
                        "(columns: method,accuracy) and the matching PNG figures")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(_Options(args))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OctbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
