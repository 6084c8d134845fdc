"""File formats used by the command-line tool.

* 1D fields: CSV with header ``x,value``.
* 2D fields: 16-bit binary PGM (``P5``, maxval 65535, big-endian) for viewing,
  plus a ``.f64`` sidecar of little-endian float64 samples in row-major order
  for lossless metrics.
* Tables: CSV with a header row; floats written with ``repr`` so reruns are
  byte-identical.
* Config: flat ``key = value`` lines, ``#`` comments, dashes or underscores in
  keys.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .spectral import Field, Grid

__all__ = [
    "write_field_csv",
    "read_field_csv",
    "write_raw",
    "read_raw",
    "write_pgm16",
    "read_pgm16",
    "write_table",
    "write_json",
    "read_field",
    "read_config",
]


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, np.floating):
        return repr(float(x))
    return str(x)


def write_field_csv(path, v: Field) -> None:
    (x,) = v.grid.points()
    write_table(path, ["x", "value"], zip(x.tolist(), v.values.tolist()))


def read_field_csv(path) -> Field:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: no data rows")
    header = [h.strip() for h in rows[0]]
    col = header.index("value") if "value" in header else len(header) - 1
    vals = np.array([float(r[col]) for r in rows[1:] if r])
    return Field(Grid(1, vals.size), vals)


def write_raw(path, v: Field) -> None:
    Path(path).write_bytes(v.values.astype("<f8").tobytes())


def read_raw(path) -> Field:
    data = np.frombuffer(Path(path).read_bytes(), dtype="<f8")
    if data.size == 0:
        raise ValueError(f"{path}: empty file")
    n = math.isqrt(data.size)
    if n * n != data.size:
        raise ValueError(f"{path}: {data.size} samples is not a square image")
    return Field(Grid(2, n), data.reshape(n, n).copy())


def write_pgm16(path, v: Field, lo: float = 0.0, hi: float = 1.0) -> None:
    """Write a 2D field as a 16-bit PGM, mapping ``[lo, hi]`` to ``[0, 65535]``."""
    if v.grid.q != 2:
        raise ValueError("PGM output needs a 2D field")
    scaled = np.clip((v.values - lo) / (hi - lo), 0.0, 1.0)
    pix = np.rint(scaled * 65535).astype(">u2")
    n = v.grid.n
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n65535\n".encode("ascii"))
        fh.write(pix.tobytes())


def read_pgm16(path) -> np.ndarray:
    """Raw 16-bit pixel values of a PGM written by :func:`write_pgm16`."""
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 65535:
        raise ValueError(f"{path}: expected 16-bit PGM")
    return np.frombuffer(parts[4], dtype=">u2", count=w * h).reshape(h, w)


def write_table(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_field(path) -> Field:
    """Load a field from ``.csv`` (1D) or ``.f64`` (2D)."""
    path = Path(path)
    if path.stat().st_size == 0:
        raise ValueError(f"{path}: empty file")
    if path.suffix == ".csv":
        return read_field_csv(path)
    if path.suffix == ".f64":
        return read_raw(path)
    raise ValueError(f"{path}: unknown field format (expected .csv or .f64)")


def read_config(path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out
