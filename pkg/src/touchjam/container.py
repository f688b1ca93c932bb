"""Versioned binary container for named float64 arrays.

Layout: 8-byte magic, u32 version, u32 header length, JSON header (metadata
plus array names and dims, in order), then each array's float64
little-endian data. Used for both model checkpoints and dataset caches.
"""

from __future__ import annotations

import json
import struct

import numpy as np


class ContainerError(Exception):
    """Base class for container load failures."""


class ContainerVersionError(ContainerError):
    pass


class ContainerFormatError(ContainerError):
    """Bad magic, corrupt header, or truncated data."""


def save_container(path, magic: bytes, version: int, meta: dict, arrays: dict) -> None:
    if len(magic) != 8:
        raise ValueError("magic must be 8 bytes")
    names = sorted(arrays)
    header = dict(meta)
    header["arrays"] = [{"name": n, "dims": list(np.shape(arrays[n]))} for n in names]
    header_bytes = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(struct.pack("<II", version, len(header_bytes)))
        fh.write(header_bytes)
        for n in names:
            fh.write(np.ascontiguousarray(arrays[n], dtype="<f8").tobytes())


def load_container(path, magic: bytes, expected_version: int):
    """Returns (meta dict, arrays dict); raises distinct errors for version
    mismatch, bad magic / corrupt header, and truncation."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16:
        raise ContainerFormatError(f"{path}: truncated file")
    if blob[:8] != magic:
        raise ContainerFormatError(f"{path}: bad magic {blob[:8]!r}")
    version, header_len = struct.unpack_from("<II", blob, 8)
    if version != expected_version:
        raise ContainerVersionError(
            f"{path}: container version {version}, expected {expected_version}"
        )
    off = 16
    if off + header_len > len(blob):
        raise ContainerFormatError(f"{path}: truncated header")
    try:
        header = json.loads(blob[off : off + header_len])
        entries = header.pop("arrays")
    except (ValueError, KeyError) as exc:
        raise ContainerFormatError(f"{path}: corrupt header: {exc}") from exc
    off += header_len
    arrays = {}
    for entry in entries:
        dims = tuple(entry["dims"])
        nbytes = int(np.prod(dims)) * 8 if dims else 8
        if off + nbytes > len(blob):
            raise ContainerFormatError(f"{path}: truncated array {entry['name']!r}")
        arrays[entry["name"]] = (
            np.frombuffer(blob[off : off + nbytes], dtype="<f8").astype(np.float64).reshape(dims)
        )
        off += nbytes
    return header, arrays
