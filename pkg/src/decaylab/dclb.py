"""Binary container for spectral fields (``.dclb`` files).

Layout, all little-endian:

* magic ``DCLB`` (4 bytes)
* u32 version (currently 1)
* u32 dim, u32 points_per_axis
* f64 box_length
* u32 components
* ``components * N^dim`` complex coefficients as (re, im) f64 pairs, in C
  order over ``(components,) + (N,)*dim`` with FFT index order along each
  axis (the in-memory layout of :class:`~decaylab.field.SpectralField`).
"""

from __future__ import annotations

import struct
from os import PathLike
from pathlib import Path

import numpy as np

from .field import SpectralField
from .grid import make_grid

MAGIC = b"DCLB"
VERSION = 1

_HEADER = struct.Struct("<4sIIIdI")


class FormatError(ValueError):
    """Raised when a field file is malformed or truncated."""


def write_field(path: str | PathLike, field: SpectralField) -> None:
    payload = np.ascontiguousarray(field.coeffs, dtype="<c16")
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        field.grid.dim,
        field.grid.points_per_axis,
        field.grid.box_length,
        field.components,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))


def read_field(path: str | PathLike) -> SpectralField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, dim, n, box_length, components = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    try:
        grid = make_grid(dim, n, box_length)
    except ValueError as exc:
        raise FormatError(f"{path}: invalid grid header: {exc}") from exc
    if components < 1:
        raise FormatError(f"{path}: component count must be >= 1, got {components}")
    count = components * n**dim
    expected = _HEADER.size + 16 * count
    if len(raw) != expected:
        raise FormatError(
            f"{path}: payload size mismatch, expected {expected} bytes got {len(raw)}"
        )
    coeffs = np.frombuffer(raw, dtype="<c16", count=count, offset=_HEADER.size)
    coeffs = coeffs.reshape((components,) + (n,) * dim).astype(np.complex128)
    return SpectralField(grid, coeffs)
