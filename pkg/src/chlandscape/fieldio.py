"""Binary field files.

Layout (little endian, no padding)::

    b"CHFD" | u32 version=1 | u8 d | u32 n | f64 phi | f64 xi | n**d f64 values

Values are written x-fastest, i.e. Fortran order of the ``(n,)*d`` array.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .field import ConfigError, Field, ModelParams, check_n

MAGIC = b"CHFD"
VERSION = 1
_HEADER = struct.Struct("<4sIBIdd")


class FieldFileError(Exception):
    """Malformed field file; ``code`` names the failure."""

    NOT_A_FIELD_FILE = "not a field file"
    BAD_VERSION = "unsupported version"
    BAD_HEADER = "invalid header"
    TRUNCATED = "truncated payload"
    TRAILING = "trailing bytes"
    NON_FINITE = "non-finite payload"

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)


def encode_field(f: Field) -> bytes:
    p = f.params
    head = _HEADER.pack(MAGIC, VERSION, p.d, f.n, p.phi, p.xi)
    body = np.asarray(f.values, dtype="<f8").ravel(order="F").tobytes()
    return head + body


def decode_field(buf: bytes) -> Field:
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise FieldFileError(FieldFileError.NOT_A_FIELD_FILE)
    if len(buf) < _HEADER.size:
        raise FieldFileError(FieldFileError.TRUNCATED, "header incomplete")
    _, version, d, n, phi, xi = _HEADER.unpack_from(buf)
    if version != VERSION:
        raise FieldFileError(FieldFileError.BAD_VERSION, f"version {version}")
    try:
        params = ModelParams(d=d, xi=xi, phi=phi)
        check_n(n)
    except ConfigError as exc:
        raise FieldFileError(FieldFileError.BAD_HEADER, str(exc)) from None
    count = n**d
    need = _HEADER.size + 8 * count
    if len(buf) < need:
        raise FieldFileError(FieldFileError.TRUNCATED, f"expected {need} bytes, got {len(buf)}")
    if len(buf) > need:
        raise FieldFileError(FieldFileError.TRAILING, f"{len(buf) - need} extra bytes")
    flat = np.frombuffer(buf, dtype="<f8", count=count, offset=_HEADER.size)
    if not np.all(np.isfinite(flat)):
        raise FieldFileError(FieldFileError.NON_FINITE)
    values = np.ascontiguousarray(flat.reshape((n,) * d, order="F"), dtype=np.float64)
    return Field(params, values)


def write_field(path, f: Field) -> None:
    Path(path).write_bytes(encode_field(f))


def read_field(path) -> Field:
    return decode_field(Path(path).read_bytes())
