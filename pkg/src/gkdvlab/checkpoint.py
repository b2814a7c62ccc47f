"""Binary checkpoint files.

Layout (little-endian, no padding)::

    magic   5 bytes  b"GKDV1"
    version u16      1
    N       u64
    L       f64
    t       f64
    payload N * f64  physical samples u(x_j, t)
"""

import struct
from dataclasses import dataclass

import numpy as np

from .spectral import Grid, RealField, SpectralField, forward, inverse

MAGIC = b"GKDV1"
VERSION = 1
HEADER = struct.Struct("<5sHQdd")


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class Checkpoint:
    grid: Grid
    t: float
    samples: np.ndarray

    @classmethod
    def from_field(cls, u, t):
        if isinstance(u, SpectralField):
            u = inverse(u)
        return cls(u.grid, float(t), u.samples)

    def to_field(self):
        return forward(RealField(self.grid, self.samples))

    def to_bytes(self):
        payload = np.ascontiguousarray(self.samples, dtype="<f8").tobytes()
        return HEADER.pack(MAGIC, VERSION, self.grid.N, self.grid.L, self.t) + payload

    @classmethod
    def from_bytes(cls, data):
        if len(data) < HEADER.size:
            raise CheckpointError("truncated checkpoint header")
        magic, version, N, L, t = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise CheckpointError(f"bad magic {magic!r}")
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        expected = HEADER.size + 8 * N
        if len(data) != expected:
            raise CheckpointError(f"payload size {len(data) - HEADER.size} != 8*N = {8 * N}")
        samples = np.frombuffer(data, dtype="<f8", count=N, offset=HEADER.size).astype(float)
        return cls(Grid(N, L), t, samples)


def write_checkpoint(path, u, t):
    with open(path, "wb") as fh:
        fh.write(Checkpoint.from_field(u, t).to_bytes())


def read_checkpoint(path):
    with open(path, "rb") as fh:
        return Checkpoint.from_bytes(fh.read())
