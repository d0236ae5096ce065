"""Plot-ready CSV/JSON writers and their readers.

Floats are written with ``repr`` so every file reads back bit-for-bit.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .curve import CurveModel
from .model import FrequencyTable


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_rows(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def curve_rows(curve: CurveModel):
    return list(curve.rows())


def write_curve_csv(path, rows) -> Path:
    """``rows`` are (r, R, zone) triples."""
    return write_rows(path, ("r", "R", "zone"), rows)


def read_curve_csv(path) -> list[tuple[int, float, str]]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["r", "R", "zone"]:
            raise ValueError(f"{path}: unexpected header {header}")
        return [(int(r), float(R), z) for r, R, z in reader]


def write_frequency_csv(path, table: FrequencyTable) -> Path:
    return write_rows(path, ("n", "count"), zip(table.n, table.count))


def read_frequency_csv(path) -> FrequencyTable:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["n", "count"]:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = [(int(n), float(c)) for n, c in reader]
    return FrequencyTable(np.array([n for n, _ in rows], dtype=np.int64),
                          np.array([c for _, c in rows], dtype=float))


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
