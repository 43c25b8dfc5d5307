"""Matrix, symbol and lattice-function file formats.

JSON matrices are ``{"rows", "cols", "re", "im"}`` in row-major order. The
binary form is ``b"MSMT"``, two little-endian u32 (rows, cols), then
rows*cols little-endian (f64 re, f64 im) pairs. Python's ``repr`` of a float
round-trips exactly, so JSON files preserve entries bitwise.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .linalg import as_matrix

MAGIC = b"MSMT"


class FormatError(ValueError):
    """Malformed input file."""


def matrix_to_dict(A) -> dict:
    M = as_matrix(A)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "re": M.real.ravel().tolist(),
        "im": M.imag.ravel().tolist(),
    }


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        r, c = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros(r * c)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad matrix object: {exc}") from exc
    if r <= 0 or c <= 0 or re.size != r * c or im.size != r * c:
        raise FormatError(f"matrix object has {re.size} entries for a {r}x{c} shape")
    return as_matrix((re + 1j * im).reshape(r, c))


def write_matrix_binary(path, A) -> None:
    M = as_matrix(A)
    r, c = M.shape
    pairs = np.empty((r * c, 2), dtype="<f8")
    pairs[:, 0] = M.real.ravel()
    pairs[:, 1] = M.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", r, c))
        fh.write(pairs.tobytes())


def read_matrix_binary(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != MAGIC:
        raise FormatError(f"{path}: missing MSMT header")
    r, c = struct.unpack("<II", data[4:12])
    body = np.frombuffer(data[12:], dtype="<f8")
    if r == 0 or c == 0 or body.size != 2 * r * c:
        raise FormatError(f"{path}: expected {2 * r * c} doubles, found {body.size}")
    pairs = body.reshape(r * c, 2)
    return as_matrix((pairs[:, 0] + 1j * pairs[:, 1]).reshape(r, c))


def read_matrix(path) -> np.ndarray:
    """Read either format, sniffing the magic bytes."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_matrix_binary(path)
    try:
        obj = json.loads(path.read_text())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: not a matrix file ({exc})") from exc
    return matrix_from_dict(obj)


def write_matrix(path, A) -> None:
    """Write JSON unless the suffix is ``.msmt`` or ``.bin``."""
    path = Path(path)
    if path.suffix in (".msmt", ".bin"):
        write_matrix_binary(path, A)
    else:
        path.write_text(json.dumps(matrix_to_dict(A)))


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialise {type(o).__name__}")
