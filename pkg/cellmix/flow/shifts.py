"""Brownian shift of the cell grid, Y_t = Y_0 + sqrt(2 nu) B_t on the torus.

Randomness comes from counter-based Philox streams.  Each consumer (shift
path, particle noise, initial data, forcing) draws from its own named
stream, keyed by split_seed(base_seed, index, stream) so that realizations
can run in any order or in parallel and still reproduce bit for bit.
"""

import hashlib
import logging
import math
import struct

import numpy as np
import pandas as pd

from cellmix.spectral.fields import TWO_PI


log = logging.getLogger(__name__)

# named streams; never reorder, seeds depend on the names only
STREAMS = ("shift", "shift-origin", "particles", "theta0", "forcing", "samples")


def split_seed(base_seed, index=0, stream="shift"):
    """Derive an independent 64-bit seed.

    The realization index is XOR-ed into the base seed and the result is
    hashed together with the stream name (BLAKE2b, 8-byte digest).

    Parameters
    ----------
    base_seed : int
    index : int, optional (default: 0)
        realization or particle-block index
    stream : str, optional (default: "shift")
        one of STREAMS

    Returns
    -------
    int
    """

    if stream not in STREAMS:
        raise ValueError("unknown random stream {!r}".format(stream))
    mixed = (int(base_seed) ^ int(index)) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.blake2b(
        struct.pack("<Q", mixed) + stream.encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


def generator(seed, index=0, stream="shift"):
    """numpy Generator over a Philox stream keyed by split_seed."""
    return np.random.Generator(np.random.Philox(split_seed(seed, index, stream)))


def step_count(t_final, dt):
    """Number of steps of size dt needed to reach t_final."""
    # guard against 10 / 1e-3 = 10000.000000000002
    return max(int(math.ceil(t_final / dt - 1e-9)), 0)


class ShiftPath(object):
    """One time-discretized realization of the torus Brownian shift.

    Samples are stored unwrapped; positions on the torus are taken mod 2 pi
    when read.

    Attributes
    ----------
    nu : float
        shift diffusivity
    dt : float
        sampling step
    samples : ndarray of shape (m + 1, 2)
        unwrapped positions Y_0 .. Y_m
    seed : int
    """

    def __init__(self, nu, dt, samples, seed=None):
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[1] != 2 or len(samples) < 1:
            raise ValueError("samples must have shape (m + 1, 2)")
        samples.setflags(write=False)
        self.nu = nu
        self.dt = dt
        self.samples = samples
        self.seed = seed

    @property
    def t_final(self):
        return (len(self.samples) - 1) * self.dt

    @property
    def wrapped(self):
        return np.mod(self.samples, TWO_PI)

    def increments(self):
        return np.diff(self.samples, axis=0)

    def at(self, t):
        """Position at time t, linear interpolation of unwrapped samples.

        Times past either end are clamped to the first or last sample.
        """

        last = len(self.samples) - 1
        if last == 0:
            return np.mod(self.samples[0], TWO_PI)

        s = min(max(t / self.dt, 0.0), float(last))
        i = min(int(s), last - 1)
        w = s - i
        y = (1 - w) * self.samples[i] + w * self.samples[i + 1]
        return np.mod(y, TWO_PI)

    def to_frame(self):
        """Export as a DataFrame with columns step, y1, y2 (wrapped)."""
        wrapped = self.wrapped
        return pd.DataFrame(
            {"step": np.arange(len(wrapped)), "y1": wrapped[:, 0], "y2": wrapped[:, 1]}
        )

    @classmethod
    def from_frame(cls, df, nu, dt):
        """Rebuild a path from an exported frame.

        Wrapped samples are unwrapped again assuming increments below pi.
        """

        samples = np.unwrap(df[["y1", "y2"]].values, axis=0)
        return cls(nu, dt, samples)

    def __repr__(self):
        return "ShiftPath(nu={}, dt={}, steps={:,})".format(self.nu, self.dt, len(self.samples) - 1)


def sample_shift_path(nu, dt, t_final, seed, index=0, origin="origin"):
    """Sample Y_{m+1} = Y_m + sqrt(2 nu dt) xi_m.

    Parameters
    ----------
    nu : float
        shift diffusivity, > 0
    dt : float
        step, > 0
    t_final : float
        horizon; the path has ceil(t_final / dt) + 1 samples
    seed : int
        base seed
    index : int, optional (default: 0)
        realization index mixed into the seed
    origin : {"origin", "uniform"}, optional (default: "origin")
        Y_0 = (0, 0), or uniform on the torus from its own stream

    Returns
    -------
    ShiftPath
    """

    if not nu > 0:
        raise ValueError("shift diffusivity must be positive, got {}".format(nu))
    if not dt > 0:
        raise ValueError("time step must be positive, got {}".format(dt))

    steps = step_count(t_final, dt)
    if origin == "origin":
        y0 = np.zeros(2)
    elif origin == "uniform":
        y0 = generator(seed, index, "shift-origin").uniform(0, TWO_PI, size=2)
    else:
        raise ValueError("unknown shift origin {!r}".format(origin))

    xi = generator(seed, index, "shift").standard_normal((steps, 2))
    samples = np.empty((steps + 1, 2))
    samples[0] = y0
    np.cumsum(math.sqrt(2 * nu * dt) * xi, axis=0, out=samples[1:])
    samples[1:] += y0

    log.debug("Sampled shift path with {:,} steps (nu={}, realization {})".format(steps, nu, index))
    return ShiftPath(nu, dt, samples, seed=split_seed(seed, index, "shift"))


def frozen_path(y=(0.0, 0.0), dt=1.0):
    """A path that stays at y forever (steady cellular flow centered at y)."""
    return ShiftPath(0.0, dt, np.asarray([y, y], dtype=float))
