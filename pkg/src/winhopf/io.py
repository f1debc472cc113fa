"""File formats: symbol and pair JSON, right-hand sides, matrix export."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .symbols import pair_from_json, symbol_from_json

MAGIC = b"WHOPMTX1"


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_symbol(path):
    return symbol_from_json(read_json(path))


def load_pair(path):
    return pair_from_json(read_json(path))


# right-hand sides


def named_rhs(spec: str):
    """``"psi0"`` or ``"gauss:center,width"`` as a callable of ``t``."""
    if spec == "psi0":
        return lambda t: np.sqrt(2) * np.exp(-np.asarray(t, dtype=float)) + 0j
    if spec.startswith("gauss:"):
        try:
            c, w = (float(x) for x in spec[6:].split(","))
        except ValueError as exc:
            raise SchemaError("gauss family needs 'gauss:center,width'") from exc
        if w <= 0:
            raise SchemaError("gauss width must be positive")
        return lambda t: np.exp(-((np.asarray(t, dtype=float) - c) / w) ** 2) + 0j
    raise SchemaError(f"unknown right-hand side family {spec!r}")


def read_samples(path):
    """CSV rows ``t, value_re, value_im`` (header optional) as a linear interpolant."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for k, row in enumerate(csv.reader(fh)):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append([float(x) for x in row[:3]])
            except ValueError as exc:
                if k == 0:
                    continue  # header
                raise SchemaError(f"{path}: line {k + 1} is not numeric") from exc
    data = np.array(rows)
    if data.ndim != 2 or data.shape[1] != 3 or len(data) < 2:
        raise SchemaError(f"{path}: need at least two rows of t,value_re,value_im")
    order = np.argsort(data[:, 0])
    t, re, im = data[order].T
    if t[0] < 0:
        raise SchemaError(f"{path}: sample points must be non-negative")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, t, re, right=0.0) + 1j * np.interp(x, t, im, right=0.0)

    return f


def load_rhs(spec: str):
    """A named family or the path of a sample file."""
    if spec == "psi0" or spec.startswith("gauss:"):
        return named_rhs(spec)
    if not Path(spec).exists():
        raise SchemaError(f"right-hand side {spec!r} is neither a family nor a file")
    return read_samples(spec)


# matrices


def write_matrix(path, M, sidecar: dict | None = None):
    """Binary export: the 8-byte magic, then row-major little-endian complex128.

    The shape and the optional recipe ``sidecar`` go to ``<path>.json``.
    """
    M = np.ascontiguousarray(M, dtype="<c16")
    if M.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(M.tobytes(order="C"))
    meta = {"shape": list(M.shape), "dtype": "complex128", "order": "row-major"}
    meta.update(sidecar or {})
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)


def read_matrix(path):
    """Inverse of :func:`write_matrix`; without a sidecar the matrix is taken square."""
    with open(path, "rb") as fh:
        if fh.read(8) != MAGIC:
            raise SchemaError(f"{path}: not a matrix file")
        data = np.frombuffer(fh.read(), dtype="<c16")
    side = Path(str(path) + ".json")
    if side.exists():
        rows, cols = read_json(side)["shape"]
    else:
        rows = cols = int(round(np.sqrt(data.size)))
    if data.size != rows * cols:
        raise SchemaError(f"{path}: matrix data does not match shape {rows}x{cols}")
    return data.reshape(rows, cols)


def write_matrix_csv(path, M):
    """One row per matrix row, entries as ``re+imj``."""
    M = np.asarray(M, dtype=complex)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        for row in M:
            w.writerow([repr(complex(x)) for x in row])
