"""Binary field snapshots.

Layout (little endian):

    magic      4 bytes  b"PHI4"
    version    u32      format version (currently 1)
    n          u32      points per axis
    L          f64      half box length
    count      u32      number of fields
    timestamp  f64
    seed       u64
    payload_crc u32     CRC32 of the payload bytes
    header_crc  u32     CRC32 of all preceding header bytes
    payload    count * n^3 f64, x-major / z-fastest (C order)
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .grid import Field, GridSpec

__all__ = ["SnapshotFormatError", "SnapshotChecksumError",
           "write_snapshot", "read_snapshot"]

MAGIC = b"PHI4"
VERSION = 1
_HEADER = struct.Struct("<4sIIdIdQI")  # through payload_crc


class SnapshotFormatError(ValueError):
    """Bad magic or unsupported format version."""


class SnapshotChecksumError(ValueError):
    """Header or payload corruption detected."""


def write_snapshot(fields: list[Field], path, seed: int = 0,
                   timestamp: float = 0.0) -> None:
    if not fields:
        raise ValueError("no fields to write")
    grid = fields[0].grid
    for f in fields:
        if f.grid != grid:
            raise ValueError("snapshot fields live on different grids")
        f.check_finite()
    payload = b"".join(np.ascontiguousarray(f.values, dtype="<f8").tobytes()
                       for f in fields)
    head = _HEADER.pack(MAGIC, VERSION, grid.n, grid.L, len(fields),
                        timestamp, seed, zlib.crc32(payload))
    head += struct.pack("<I", zlib.crc32(head))
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(payload)


def read_snapshot(path) -> tuple[list[Field], dict]:
    with open(path, "rb") as fh:
        raw = fh.read()
    hlen = _HEADER.size + 4
    if len(raw) < hlen:
        raise SnapshotFormatError("file too short to hold a snapshot header")
    magic, version, n, L, count, timestamp, seed, payload_crc = \
        _HEADER.unpack(raw[:_HEADER.size])
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}")
    (header_crc,) = struct.unpack("<I", raw[_HEADER.size:hlen])
    if zlib.crc32(raw[:_HEADER.size]) != header_crc:
        raise SnapshotChecksumError("header checksum mismatch")
    payload = raw[hlen:]
    if zlib.crc32(payload) != payload_crc:
        raise SnapshotChecksumError("payload checksum mismatch (truncated?)")
    expect = count * n ** 3 * 8
    if len(payload) != expect:
        raise SnapshotChecksumError(
            f"payload length {len(payload)} != expected {expect}")
    grid = GridSpec(n, L)
    data = np.frombuffer(payload, dtype="<f8").reshape(count, n, n, n)
    fields = [Field(grid, data[i].copy()) for i in range(count)]
    meta = {"version": version, "n": n, "L": L, "count": count,
            "timestamp": timestamp, "seed": seed}
    return fields, meta
