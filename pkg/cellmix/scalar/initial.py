"""Named initial data for the passive scalar."""

import logging

import numpy as np

from cellmix.flow.shifts import split_seed
from cellmix.spectral.fields import (
    TWO_PI,
    grid_points,
    l2_norm,
    project_mean_zero,
    random_bandlimited,
    transform,
)


log = logging.getLogger(__name__)

THETA0_KINDS = ("sine", "disk", "random_bandlimited", "stream")

# disk radius: the disk covers half the torus
DISK_RADIUS = np.sqrt(2 * np.pi)

# width of the tanh edge, in grid cells
DISK_SMOOTHING_CELLS = 4


def sine(n):
    """theta0 = sin(x1)"""
    x1, _ = grid_points(n)
    return transform(np.broadcast_to(np.sin(x1), (n, n)))


def disk(n):
    """Smoothed +-1 indicator of a disk centered in the torus.

    The edge is a tanh profile DISK_SMOOTHING_CELLS grid cells wide; the
    result is projected to mean zero.
    """

    x1, x2 = grid_points(n)
    r = np.sqrt((x1 - np.pi) ** 2 + (x2 - np.pi) ** 2)
    width = DISK_SMOOTHING_CELLS * TWO_PI / n
    values = -np.tanh((r - DISK_RADIUS) / width)
    return project_mean_zero(transform(values))


def stream(n):
    """The cellular stream function sin(x1) sin(x2), a steady solution at kappa = 0."""
    x1, x2 = grid_points(n)
    return transform(np.sin(x1) * np.sin(x2))


def make_theta0(kind, n, kmax=4, seed=0, index=0):
    """Build a named initial datum.

    Parameters
    ----------
    kind : str
        one of THETA0_KINDS
    n : int
        grid size
    kmax : int, optional (default: 4)
        bandwidth of random_bandlimited
    seed : int, optional (default: 0)
    index : int, optional (default: 0)
        realization index; random data use their own seed stream

    Returns
    -------
    SpectralField2D
    """

    if kind == "sine":
        return sine(n)
    if kind == "disk":
        return disk(n)
    if kind == "stream":
        return stream(n)
    if kind == "random_bandlimited":
        return random_bandlimited(n, kmax, split_seed(seed, index, "theta0"))
    raise ValueError("unknown initial datum {!r}".format(kind))


def ensure_mean_zero(field, tol=1e-10):
    """Project a field to mean zero, warning when the mean was above tol."""
    scale = max(l2_norm(field), np.finfo(float).tiny)
    if abs(field.mean) * TWO_PI > tol * scale:
        log.warning(
            "Initial datum has mean {:.3e}; projecting to mean zero".format(field.mean)
        )
    return project_mean_zero(field)
