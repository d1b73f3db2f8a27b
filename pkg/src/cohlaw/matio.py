"""Reading and writing sample matrices.

Two on-disk forms are supported. The binary form is a 24-byte header
(magic ``COHM``, u32 format version, u32 n, u32 p, u64 seed, all
little-endian) followed by the n*p float64 entries in column-major order.
The CSV form is one matrix row per line; it keeps the values but drops the
seed, which is restored as 0 on read.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FileFormatError, ParameterError
from .sampling import SampleMatrix

__all__ = ["MAGIC", "FORMAT_VERSION", "read_matrix", "write_matrix"]

MAGIC = b"COHM"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIIQ")  # magic, version, n, p, seed


def write_matrix(matrix: SampleMatrix, path, fmt: str = "bin") -> None:
    """Write ``matrix`` to ``path`` in the given format ("bin" or "csv")."""
    path = Path(path)
    if fmt == "bin":
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, matrix.n, matrix.p, matrix.seed & 0xFFFFFFFFFFFFFFFF)
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(matrix.data.T, dtype="<f8").tobytes())
    elif fmt == "csv":
        np.savetxt(path, matrix.data, delimiter=",", fmt="%.17g")
    else:
        raise ParameterError(f"unknown matrix format {fmt!r}; expected 'bin' or 'csv'")


def _read_binary(path: Path) -> SampleMatrix:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FileFormatError(f"{path}: file shorter than the {_HEADER.size}-byte header")
        magic, version, n, p, seed = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FileFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise FileFormatError(f"{path}: unsupported format version {version}")
        payload = fh.read()
    expected = n * p * 8
    if len(payload) != expected:
        raise FileFormatError(f"{path}: payload holds {len(payload)} bytes, header implies {expected}")
    flat = np.frombuffer(payload, dtype="<f8")
    data = np.asfortranarray(flat.reshape((n, p), order="F"))
    return SampleMatrix(n=n, p=p, data=data, seed=int(seed), spec=None)


def _read_csv(path: Path) -> SampleMatrix:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise FileFormatError(f"{path}: not parseable as CSV ({exc})") from exc
    n, p = data.shape
    return SampleMatrix(n=n, p=p, data=np.asfortranarray(data), seed=0, spec=None)


def read_matrix(path, fmt: str | None = None) -> SampleMatrix:
    """Read a matrix written by :func:`write_matrix`.

    When ``fmt`` is None the format is sniffed from the first four bytes.
    Matrices loaded from disk carry ``spec=None``; CSV files also lose the
    seed and come back with ``seed=0``.
    """
    path = Path(path)
    if fmt is None:
        with open(path, "rb") as fh:
            fmt = "bin" if fh.read(4) == MAGIC else "csv"
    if fmt == "bin":
        return _read_binary(path)
    if fmt == "csv":
        return _read_csv(path)
    raise ParameterError(f"unknown matrix format {fmt!r}; expected 'bin' or 'csv'")
