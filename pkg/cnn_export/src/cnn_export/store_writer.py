"""Writer for the benchmark's binary feature-store format.

Layout (all integers little-endian):

    magic b"OCTF" | version u16 = 1 | dim u32 | row_count u32 | class_count u16
    class table: per class, name_len u16 + UTF-8 bytes
    rows: per row, id_len u16 + UTF-8 record_id + label_index u16 + dim * f32

Implemented here independently so this tool talks to the benchmark purely
through the published file contract.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"OCTF"
VERSION = 1


def write_store(path, classes: list[str], record_ids: list[str],
                labels, values: np.ndarray) -> None:
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2 or values.shape[0] != len(record_ids):
        raise ValueError(f"values shape {values.shape} inconsistent with "
                         f"{len(record_ids)} record ids")
    dim = values.shape[1]
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HIIH", VERSION, dim, len(record_ids), len(classes)))
        for name in classes:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        for rid, label, row in zip(record_ids, labels, values):
            raw = rid.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<H", int(label)))
            fh.write(row.tobytes())
