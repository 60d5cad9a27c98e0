"""MXC1 binary snapshots.

Layout: magic b"MXC1", uint32 dimension count d, uint32 n, then n**d
little-endian float64 values in row-major order.
"""

import struct

import numpy as np


MAGIC = b"MXC1"
HEADER = struct.Struct("<4sII")


def write_snapshot(path, values):
    """Write a real d-dimensional n^d array (d = 2 or 6)."""
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.ndim not in (2, 6) or len(set(values.shape)) != 1:
        raise ValueError("snapshots hold n^2 or n^6 arrays, got {}".format(values.shape))

    with open(path, "wb") as out:
        out.write(HEADER.pack(MAGIC, values.ndim, values.shape[0]))
        out.write(values.tobytes(order="C"))


def read_snapshot(path):
    """Read an MXC1 snapshot back into an ndarray."""
    with open(path, "rb") as src:
        magic, ndim, n = HEADER.unpack(src.read(HEADER.size))
        if magic != MAGIC:
            raise ValueError("{} is not an MXC1 snapshot".format(path))
        data = np.frombuffer(src.read(), dtype="<f8")

    if data.size != n ** ndim:
        raise ValueError(
            "truncated snapshot: expected {:,} values, found {:,}".format(n ** ndim, data.size)
        )
    return data.reshape((n,) * ndim).astype(np.float64)
