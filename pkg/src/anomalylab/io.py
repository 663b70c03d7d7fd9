"""Durable outputs: snapshots, manifests, CSV helpers.

Snapshot format: a 32-byte header (8-byte magic ``ANMLAB01``, little-endian
uint64 grid size, little-endian float64 time, 8 zero pad bytes) followed by
the N x N grid values as little-endian float64 in row-major order.
"""

from __future__ import annotations

import csv
import json
import struct
import time
from pathlib import Path

import numpy as np

from .fields import ScalarField2D

SNAPSHOT_MAGIC = b"ANMLAB01"
FLOAT_FMT = "%.17g"


def write_snapshot(path, field: ScalarField2D, t: float) -> None:
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<Q", field.n))
        fh.write(struct.pack("<d", t))
        fh.write(b"\0" * 8)
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_snapshot(path) -> tuple[ScalarField2D, float]:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not a snapshot file (magic {magic!r})")
        (n,) = struct.unpack("<Q", fh.read(8))
        (t,) = struct.unpack("<d", fh.read(8))
        fh.read(8)
        values = np.frombuffer(fh.read(int(n) * int(n) * 8), dtype="<f8").reshape(int(n), int(n))
    return ScalarField2D(values.copy()), t


def write_csv_rows(path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            out = []
            for c in columns:
                val = row.get(c, "")
                out.append(FLOAT_FMT % val if isinstance(val, float) else str(val))
            w.writerow(out)


class Manifest:
    """One manifest per command; every output file is referenced exactly once."""

    def __init__(self, command: str, config_echo: dict, out_dir: Path):
        self.command = command
        self.config = config_echo
        self.out_dir = Path(out_dir)
        self.outputs: list[str] = []
        self.diagnostics: dict = {}
        self._t0 = time.monotonic()

    def add_output(self, path) -> None:
        self.outputs.append(str(Path(path).name))

    def path(self) -> Path:
        return self.out_dir / f"{self.command}_manifest.json"

    def write(self) -> Path:
        import numpy
        import scipy

        from . import __version__

        doc = {
            "command": self.command,
            "config": _jsonable(self.config),
            "versions": {
                "anomalylab": __version__,
                "numpy": numpy.__version__,
                "scipy": scipy.__version__,
            },
            "wall_time_s": time.monotonic() - self._t0,
            "outputs": self.outputs,
            "diagnostics": _jsonable(self.diagnostics),
        }
        p = self.path()
        with open(p, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return p


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and (obj != obj or obj in (float("inf"), float("-inf"))):
        return str(obj)
    return obj
