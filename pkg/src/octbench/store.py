"""Binary feature-store files: labeled feature matrices, bit-exact.

File layout (all integers little-endian):

    magic b"OCTF" | version u16 = 1 | dim u32 | row_count u32 | class_count u16
    class table: per class, name_len u16 + UTF-8 bytes
    rows: per row, id_len u16 + UTF-8 record_id + label_index u16 + dim * f32

This is the ingestion contract for externally computed features (deep
network embeddings) as well as the output of the built-in extractors.
Values are stored as 32-bit floats; FeatureMatrix keeps them in float32 so
write/read is an exact identity. The in-memory ``source`` tag is a runtime
annotation only; the file format has no slot for it.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .dataset import DatasetManifest
from .errors import (
    DimMismatchError,
    MagicMismatchError,
    StoreError,
    TruncatedFileError,
    VersionUnsupportedError,
)

MAGIC = b"OCTF"
VERSION = 1


@dataclass
class FeatureMatrix:
    """N x dim float32 feature rows with aligned labels and record ids."""

    values: np.ndarray
    record_ids: list[str]
    labels: np.ndarray
    classes: list[str]
    source: str = field(default="", compare=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float32)
        if self.values.ndim != 2:
            raise DimMismatchError(f"values must be 2-D, got shape {self.values.shape}")
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = self.values.shape[0]
        if len(self.record_ids) != n or self.labels.shape != (n,):
            raise DimMismatchError("record_ids/labels length inconsistent with values")
        if len(set(self.record_ids)) != n:
            raise StoreError("record_ids must be unique")
        if n and (self.labels.min() < 0 or self.labels.max() >= len(self.classes)):
            raise StoreError("label index outside class table")
        if not np.all(np.isfinite(self.values)):
            raise StoreError("feature values must be finite")

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (self.record_ids == other.record_ids
                and self.classes == other.classes
                and np.array_equal(self.labels, other.labels)
                and self.values.shape == other.values.shape
                and self.values.tobytes() == other.values.tobytes())


def write_store(matrix: FeatureMatrix, path) -> None:
    ids = [rid.encode("utf-8") for rid in matrix.record_ids]
    names = [c.encode("utf-8") for c in matrix.classes]
    if any(len(b) > 0xFFFF for b in ids + names):
        raise StoreError("record id or class name longer than 65535 UTF-8 bytes")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HIIH", VERSION, matrix.dim, matrix.n_rows, len(matrix.classes)))
        for name in names:
            fh.write(struct.pack("<H", len(name)))
            fh.write(name)
        for i, rid in enumerate(ids):
            fh.write(struct.pack("<H", len(rid)))
            fh.write(rid)
            fh.write(struct.pack("<H", int(matrix.labels[i])))
            fh.write(matrix.values[i].tobytes())


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedFileError(
                f"file ends inside {what} (need {n} bytes at offset {self.pos})")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u16(self, what: str) -> int:
        return struct.unpack("<H", self.take(2, what))[0]

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]


def read_store(path) -> FeatureMatrix:
    with open(path, "rb") as fh:
        data = fh.read()
    r = _Reader(data)

    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise MagicMismatchError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version = r.u16("version")
    if version != VERSION:
        raise VersionUnsupportedError(f"unsupported store version {version}")
    dim = r.u32("dim")
    row_count = r.u32("row count")
    class_count = r.u16("class count")

    classes = []
    for _ in range(class_count):
        name_len = r.u16("class table")
        classes.append(r.take(name_len, "class table").decode("utf-8"))

    record_ids: list[str] = []
    labels = np.zeros(row_count, dtype=np.int64)
    values = np.zeros((row_count, dim), dtype=np.float32)
    for i in range(row_count):
        id_len = r.u16(f"row {i} id")
        record_ids.append(r.take(id_len, f"row {i} id").decode("utf-8"))
        labels[i] = r.u16(f"row {i} label")
        payload = r.data[r.pos:r.pos + 4 * dim]
        if len(payload) < 4 * dim:
            raise DimMismatchError(
                f"row {i} holds {len(payload) // 4} of {dim} declared values")
        r.pos += 4 * dim
        values[i] = np.frombuffer(payload, dtype="<f4")
    if r.pos != len(data):
        raise StoreError(f"{len(data) - r.pos} trailing bytes after last row")
    return FeatureMatrix(values=values, record_ids=record_ids, labels=labels, classes=classes)


@dataclass
class ValidationReport:
    """Record ids in the manifest split but not the matrix, and vice versa."""

    missing: list[str]
    unexpected: list[str]

    @property
    def ok(self) -> bool:
        return not self.missing and not self.unexpected


def validate_against_manifest(matrix: FeatureMatrix, manifest: DatasetManifest,
                              split: str) -> ValidationReport:
    expected = {r.record_id for r in manifest.split_records(split)}
    present = set(matrix.record_ids)
    return ValidationReport(missing=sorted(expected - present),
                            unexpected=sorted(present - expected))
