"""Matrix (de)serialization: JSON objects and CSV files.

JSON format: {"rows": n, "cols": m, "data": [[row], ...]}. CSV alternative:
one matrix row per line, comma separated. Ragged rows are rejected in both
formats.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError
from .linalg import ensure_matrix

__all__ = [
    "matrix_to_obj",
    "matrix_from_obj",
    "load_matrix",
    "save_matrix",
    "vector_from_obj",
]


def matrix_to_obj(m) -> dict:
    arr = ensure_matrix(m)
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "data": [[float(x) for x in row] for row in arr],
    }


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixFormatError(f"expected a matrix object, got {type(obj).__name__}")
    missing = {"rows", "cols", "data"} - obj.keys()
    if missing:
        raise MatrixFormatError(f"matrix object missing keys: {sorted(missing)}")
    rows, cols = obj["rows"], obj["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise MatrixFormatError("rows and cols must be positive integers")
    data = obj["data"]
    if len(data) != rows:
        raise MatrixFormatError(f"declared {rows} rows, data has {len(data)}")
    for i, row in enumerate(data):
        if len(row) != cols:
            raise MatrixFormatError(f"row {i} has {len(row)} entries, expected {cols}")
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(f"non-numeric matrix entry: {exc}") from exc
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError("matrix entries must be finite")
    return arr


def _matrix_from_csv(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    with path.open(newline="") as handle:
        for line_no, record in enumerate(csv.reader(handle), start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            try:
                rows.append([float(cell) for cell in record])
            except ValueError as exc:
                raise MatrixFormatError(f"{path}:{line_no}: {exc}") from exc
    if not rows:
        raise MatrixFormatError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise MatrixFormatError(f"{path}: ragged rows (widths {sorted(widths)})")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError(f"{path}: matrix entries must be finite")
    return arr


def load_matrix(path, key: str | None = None) -> np.ndarray:
    """Load a matrix from a .json or .csv file.

    For JSON, the file may hold the matrix object directly or wrap it under
    `key` (e.g. a system file {"F": ..., "K": ...}).
    """
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return _matrix_from_csv(p)
    try:
        obj = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{p}: invalid JSON: {exc}") from exc
    if key is not None:
        if not isinstance(obj, dict) or key not in obj:
            raise MatrixFormatError(f"{p}: missing key {key!r}")
        obj = obj[key]
    return matrix_from_obj(obj)


def save_matrix(m, path) -> None:
    p = Path(path)
    if p.suffix.lower() == ".csv":
        arr = ensure_matrix(m)
        with p.open("w", newline="") as handle:
            writer = csv.writer(handle)
            for row in arr:
                writer.writerow([repr(float(x)) for x in row])
        return
    p.write_text(json.dumps(matrix_to_obj(m)))


def vector_from_obj(obj, name: str = "vector") -> np.ndarray:
    """Accept either a JSON array of numbers or a one-column/one-row matrix."""
    if isinstance(obj, list):
        try:
            arr = np.array(obj, dtype=float)
        except (TypeError, ValueError) as exc:
            raise MatrixFormatError(f"{name}: non-numeric entry: {exc}") from exc
        if arr.ndim != 1:
            raise MatrixFormatError(f"{name}: expected a flat array")
    elif isinstance(obj, dict):
        arr = matrix_from_obj(obj)
        if 1 not in arr.shape:
            raise MatrixFormatError(f"{name}: matrix form must have one row or column")
        arr = arr.reshape(-1)
    else:
        raise MatrixFormatError(f"{name}: expected array or matrix object")
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError(f"{name}: entries must be finite")
    return arr
