"""Dataset manifests and stratified train/validation resampling.

A manifest is a CSV with header ``record_id,label,split`` describing a
labeled image corpus on disk. Resampling draws a fraction of each class's
train records into a new train set and a disjoint fraction into a new
validation set; test records always pass through untouched.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    DuplicateRecordIdError,
    InsufficientRecordsError,
    ParseError,
)

SPLITS = ("train", "val", "test")

_HEADER = ["record_id", "label", "split"]


class ManifestRecord(NamedTuple):
    record_id: str
    label: str
    split: str


@dataclass
class DatasetManifest:
    """Ordered records plus the canonical class order.

    ``classes`` defines the label-index mapping used everywhere downstream
    (feature stores, models, reports); it is the sorted list of distinct
    labels unless supplied explicitly.
    """

    records: list[ManifestRecord]
    classes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.classes:
            self.classes = sorted({r.label for r in self.records})
        seen = set()
        for r in self.records:
            if r.record_id in seen:
                raise DuplicateRecordIdError(f"duplicate record_id: {r.record_id}")
            seen.add(r.record_id)
            if r.label not in self.classes:
                raise ParseError(f"label {r.label!r} not in class list {self.classes}")
            if r.split not in SPLITS:
                raise ParseError(f"invalid split {r.split!r} for {r.record_id}")

    def label_index(self, label: str) -> int:
        return self.classes.index(label)

    def split_records(self, split: str) -> list[ManifestRecord]:
        return [r for r in self.records if r.split == split]

    def counts(self) -> dict[str, dict[str, int]]:
        """Per-class record counts keyed by class then split."""
        out = {c: {s: 0 for s in SPLITS} for c in self.classes}
        for r in self.records:
            out[r.label][r.split] += 1
        return out


@dataclass(frozen=True)
class ResampleSpec:
    """Per-class fractions drawn from the original train split.

    Matches the published pipeline defaults: a quarter of the train images
    become the new train set and a disjoint eighth the new validation set.
    """

    train_fraction: float = 0.25
    val_fraction: float = 0.125
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.train_fraction <= 1.0):
            raise ValueError(f"train_fraction must be in (0, 1], got {self.train_fraction}")
        if not (0.0 <= self.val_fraction < 1.0):
            raise ValueError(f"val_fraction must be in [0, 1), got {self.val_fraction}")
        if self.train_fraction + self.val_fraction > 1.0:
            raise ValueError("train_fraction + val_fraction must not exceed 1")


def load_manifest(path) -> DatasetManifest:
    """Parse a manifest CSV; raises ParseError with the 1-based line number."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _parse_manifest(fh)


def loads_manifest(text: str) -> DatasetManifest:
    return _parse_manifest(io.StringIO(text))


def _parse_manifest(fh) -> DatasetManifest:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty manifest file", line=1) from None
    if header != _HEADER:
        raise ParseError(f"expected header {','.join(_HEADER)!r}, got {','.join(header)!r}", line=1)

    records: list[ManifestRecord] = []
    seen: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
        record_id, label, split = row
        if not record_id:
            raise ParseError("empty record_id", line=lineno)
        if record_id in seen:
            raise DuplicateRecordIdError(f"line {lineno}: duplicate record_id: {record_id}")
        if split not in SPLITS:
            raise ParseError(f"invalid split {split!r} (expected one of {'/'.join(SPLITS)})", line=lineno)
        seen.add(record_id)
        records.append(ManifestRecord(record_id, label, split))
    return DatasetManifest(records=records)


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write UTF-8 CSV with LF line endings; load(save(m)) is identity."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_HEADER)
        for r in manifest.records:
            writer.writerow([r.record_id, r.label, r.split])


def _class_rng(seed: int, class_index: int) -> np.random.Generator:
    # independent stream per class so adding a class does not reshuffle others
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, class_index])
    return np.random.default_rng(ss)


def resample(manifest: DatasetManifest, spec: ResampleSpec) -> DatasetManifest:
    """Stratified redraw of the train split into new train/val sets.

    Per class with n train records, floor(train_fraction * n) go to the new
    train set and floor(val_fraction * n) of the remaining ones to the new
    validation set; everything else from train (and the old val split) is
    dropped. Test records are preserved byte-identically. Deterministic
    given spec.seed: records are sorted by id before the seeded shuffle, so
    the result does not depend on the manifest's row order.
    """
    if not any(r.split == "train" for r in manifest.records):
        raise InsufficientRecordsError("manifest has no train records to resample")

    assignment: dict[str, str] = {}
    for class_index, cls in enumerate(manifest.classes):
        ids = sorted(r.record_id for r in manifest.records
                     if r.label == cls and r.split == "train")
        n = len(ids)
        n_train = int(np.floor(spec.train_fraction * n))
        n_val = int(np.floor(spec.val_fraction * n))
        if n_train + n_val > n:
            raise InsufficientRecordsError(
                f"class {cls}: requested {n_train}+{n_val} records from {n} train records")
        order = _class_rng(spec.seed, class_index).permutation(n)
        for i in order[:n_train]:
            assignment[ids[i]] = "train"
        for i in order[n_train:n_train + n_val]:
            assignment[ids[i]] = "val"

    new_records: list[ManifestRecord] = []
    for r in manifest.records:
        if r.split == "test":
            new_records.append(r)
        elif r.split == "train" and r.record_id in assignment:
            new_records.append(ManifestRecord(r.record_id, r.label, assignment[r.record_id]))
        # unselected train records and the old val split are dropped
    return DatasetManifest(records=new_records, classes=list(manifest.classes))
