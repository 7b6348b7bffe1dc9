"""Reader for the benchmark's manifest CSV (header record_id,label,split).

Label indices follow the same convention as the rest of the toolchain: the
class table is the lexicographically sorted list of distinct labels.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import ManifestError

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class Record:
    record_id: str
    label: str
    split: str


@dataclass
class Manifest:
    records: list[Record]
    classes: list[str]

    def split_records(self, split: str) -> list[Record]:
        return [r for r in self.records if r.split == split]

    def label_index(self, label: str) -> int:
        return self.classes.index(label)


def load_manifest(path) -> Manifest:
    records: list[Record] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["record_id", "label", "split"]:
            raise ManifestError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ManifestError(f"{path}:{lineno}: expected 3 fields")
            rid, label, split = row
            if split not in SPLITS:
                raise ManifestError(f"{path}:{lineno}: invalid split {split!r}")
            if rid in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate record_id {rid!r}")
            seen.add(rid)
            records.append(Record(rid, label, split))
    classes = sorted({r.label for r in records})
    return Manifest(records=records, classes=classes)
