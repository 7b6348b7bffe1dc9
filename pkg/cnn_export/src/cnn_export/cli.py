"""CLI: export pretrained-CNN embeddings into a benchmark feature store."""

from __future__ import annotations

import argparse
import sys

from .errors import ExportError
from .export import EXPECTED_PARAMS, ExportSpec, export_features


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cnn-export")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="write embeddings for one manifest split")
    p.add_argument("--model", required=True, choices=sorted(EXPECTED_PARAMS))
    p.add_argument("--manifest", required=True)
    p.add_argument("--root", required=True,
                   help="root of preprocessed 224x224 images (record_id paths)")
    p.add_argument("--split", default="train", choices=["train", "val", "test"])
    p.add_argument("--out", required=True, help="output feature store")
    p.add_argument("--weights", default="imagenet", choices=["imagenet", "none"],
                   help="'none' uses a seeded random init (format/dim testing)")
    p.add_argument("--batch-size", type=int, default=32)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = ExportSpec(model=args.model,
                      manifest_path=args.manifest,
                      dataset_root=args.root,
                      output_path=args.out,
                      split=args.split,
                      weights=args.weights,
                      batch_size=args.batch_size)
    try:
        n = export_features(spec)
    except (ExportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"exported {n} rows ({args.model}, split {args.split}) -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
