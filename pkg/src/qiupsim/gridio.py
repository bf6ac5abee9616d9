"""File formats: 16-bit binary PGM, full-precision CSV matrices, JSON metadata."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError, RangeError

__all__ = ["write_pgm16", "read_pgm16", "write_csv_matrix", "read_csv_matrix",
           "write_scaled_pgm", "write_metadata"]


def write_pgm16(path, values: np.ndarray):
    """Write a uint16 array as binary PGM (P5, maxval 65535, big-endian)."""
    values = np.asarray(values)
    if values.dtype != np.uint16:
        if values.min() < 0 or values.max() > 65535:
            raise RangeError("values outside the 16-bit encoding range")
        values = values.astype(np.uint16)
    ny, nx = values.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n65535\n".encode("ascii"))
        fh.write(values.astype(">u2").tobytes())


def read_pgm16(path) -> np.ndarray:
    """Read a binary 16-bit PGM written by :func:`write_pgm16` (bit-exact)."""
    data = Path(path).read_bytes()
    try:
        # header: magic, dimensions, maxval, separated by whitespace/comments
        tokens = []
        idx = 0
        while len(tokens) < 4:
            while idx < len(data) and data[idx : idx + 1].isspace():
                idx += 1
            if data[idx : idx + 1] == b"#":
                while idx < len(data) and data[idx] != 0x0A:
                    idx += 1
                continue
            start = idx
            while idx < len(data) and not data[idx : idx + 1].isspace():
                idx += 1
            tokens.append(data[start:idx])
        idx += 1  # single whitespace after maxval
        magic, nx, ny, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
        if magic != b"P5":
            raise ParseError("not a binary PGM (P5) file")
        if maxval != 65535:
            raise ParseError("expected 16-bit PGM (maxval 65535)")
        raw = data[idx : idx + nx * ny * 2]
        if len(raw) != nx * ny * 2:
            raise ParseError("truncated PGM pixel data")
        return np.frombuffer(raw, dtype=">u2").reshape(ny, nx).astype(np.uint16)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"malformed PGM: {exc}") from exc


def write_scaled_pgm(path, values: np.ndarray) -> float:
    """Write a float array as 16-bit PGM scaled to full range; returns the scale factor."""
    values = np.asarray(values, dtype=float)
    peak = values.max()
    scale = 65535.0 / peak if peak > 0 else 1.0
    write_pgm16(path, np.rint(np.clip(values * scale, 0, 65535)).astype(np.uint16))
    return scale


def write_csv_matrix(path, values: np.ndarray):
    """Row-major decimal CSV at full double precision."""
    np.savetxt(path, np.asarray(values, dtype=float), delimiter=",", fmt="%.17g")


def read_csv_matrix(path) -> np.ndarray:
    try:
        return np.atleast_2d(np.loadtxt(path, delimiter=","))
    except ValueError as exc:
        raise ParseError(f"malformed CSV matrix: {exc}") from exc


def write_metadata(path, meta: dict):
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
