"""Result persistence: monitor CSV, binary field snapshots, grayscale PGM.

Snapshot layout: an 8-byte little-endian length prefix, that many bytes of
UTF-8 JSON header, then the payload as raw little-endian float64 values in
C order. The header alone determines the payload shape, so files are
self-describing. CSV floats carry 17 significant digits and re-parse to
the identical doubles.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .fields import determinant_field
from .stepping import MonitorSeries

__all__ = [
    "SnapshotHeader",
    "write_snapshot",
    "read_snapshot",
    "write_monitor_csv",
    "write_determinant_pgm",
    "RunWriter",
]

SNAPSHOT_SCHEMA_VERSION = 1
PGM_DET_RANGE = (-1.05, 1.05)


@dataclass(frozen=True)
class SnapshotHeader:
    schema_version: int
    d: int
    n: int
    m: int
    t: float
    payload: str  # "field" | "determinant"
    byte_order: str = "little"
    element_type: str = "float64"

    def __post_init__(self):
        if self.payload not in ("field", "determinant"):
            raise ValueError(f"payload must be 'field' or 'determinant', got {self.payload!r}")
        if self.byte_order != "little" or self.element_type != "float64":
            raise ValueError("only little-endian float64 snapshots are supported")

    @property
    def payload_shape(self) -> tuple:
        cells = (self.n,) * self.d
        return cells + (self.m, self.m) if self.payload == "field" else cells

    @property
    def element_count(self) -> int:
        return int(np.prod(self.payload_shape))


def field_header(array: np.ndarray, t: float) -> SnapshotHeader:
    d = array.ndim - 2
    return SnapshotHeader(SNAPSHOT_SCHEMA_VERSION, d, array.shape[0], array.shape[-1], float(t), "field")


def determinant_header(det: np.ndarray, t: float, m: int) -> SnapshotHeader:
    return SnapshotHeader(SNAPSHOT_SCHEMA_VERSION, det.ndim, det.shape[0], m, float(t), "determinant")


def write_snapshot(array: np.ndarray, header: SnapshotHeader, path) -> None:
    array = np.asarray(array, dtype=float)
    if array.shape != header.payload_shape:
        raise ValueError(f"payload shape {array.shape} does not match header {header.payload_shape}")
    blob = json.dumps(asdict(header), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(array, dtype="<f8").tobytes())


def read_snapshot(path):
    """Returns (header, array); the array shape comes from the header alone."""
    with open(path, "rb") as fh:
        (length,) = struct.unpack("<Q", fh.read(8))
        header = SnapshotHeader(**json.loads(fh.read(length).decode("utf-8")))
        data = fh.read()
    expected = header.element_count * 8
    if len(data) != expected:
        raise ValueError(f"payload of {len(data)} bytes, header implies {expected}")
    array = np.frombuffer(data, dtype="<f8").astype(float).reshape(header.payload_shape)
    return header, array


def write_monitor_csv(series: MonitorSeries, path) -> None:
    lines = ["t,sup_frob,energy"]
    for t, s, e in zip(series.times, series.sup_norms, series.energies):
        lines.append(f"{t:.17g},{s:.17g},{e:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_determinant_pgm(det: np.ndarray, path) -> None:
    """16-bit grayscale PGM; determinant mapped linearly from [-1.05, 1.05]."""
    det = np.asarray(det, dtype=float)
    if det.ndim != 2:
        raise ValueError(f"PGM export needs a 2-d determinant field, got shape {det.shape}")
    lo, hi = PGM_DET_RANGE
    scaled = np.clip((det - lo) / (hi - lo), 0.0, 1.0)
    pixels = np.rint(scaled * 65535.0).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{det.shape[1]} {det.shape[0]}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())


class RunWriter:
    """Snapshot sink for :func:`macetd.stepping.run_simulation`.

    Writes a full-field snapshot at every snapshot time; 2-d runs add a
    determinant PGM image, 3-d runs add a determinant snapshot (the full
    field file is large, and the determinant is what the interface plots
    need). File names are deterministic: snap_000_field.bin, ...
    """

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.index = 0
        self.written = []

    def __call__(self, t: float, field: np.ndarray) -> None:
        stem = f"snap_{self.index:03d}"
        self.index += 1
        self._write(field, field_header(field, t), f"{stem}_field.bin")
        d = field.ndim - 2
        det = determinant_field(field)
        if d == 2:
            path = self.out_dir / f"{stem}_det.pgm"
            write_determinant_pgm(det, path)
            self.written.append(path)
        elif d == 3:
            self._write(det, determinant_header(det, t, field.shape[-1]), f"{stem}_det.bin")

    def _write(self, array, header, name) -> None:
        path = self.out_dir / name
        write_snapshot(array, header, path)
        self.written.append(path)
