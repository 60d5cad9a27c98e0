"""Cellular velocity fields and the random cellular flow.

v_c(x) = (sin x1 cos x2, -cos x1 sin x2) is generated by the stream function
psi_c = sin x1 sin x2; the tilted field is (sin x2, sin x1).  The two are
related by v_c(x) = d^-1 R^T v_tilted(d R x) with d = sqrt(2) and R the
rotation by pi/4.
"""

import numpy as np

from cellmix.flow.shifts import ShiftPath, frozen_path
from cellmix.spectral.fields import (
    TWO_PI,
    grid_points,
    l2_norm,
    spectral_derivative,
    transform,
)


FLOW_KINDS = ("steady_cellular", "random_cellular", "tilted_cellular", "none")

DILATION = np.sqrt(2.0)
ROTATION = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2.0)


def cellular_components(x1, x2, y1=0.0, y2=0.0):
    """Components of v_c(x - y); arguments broadcast against each other."""
    a = x1 - y1
    b = x2 - y2
    return np.sin(a) * np.cos(b), -np.cos(a) * np.sin(b)


def tilted_components(x1, x2, y1=0.0, y2=0.0):
    """Components of the tilted field evaluated at x - y."""
    return np.sin(x2 - y2), np.sin(x1 - y1)


def cellular_velocity(x, y=(0.0, 0.0)):
    """Cellular velocity v_c(x - y).

    Parameters
    ----------
    x : array-like of shape (..., 2)
        points on the torus
    y : array-like of shape (2, ), optional (default: origin)
        cell grid center

    Returns
    -------
    ndarray of shape (..., 2)
    """

    x = np.asarray(x, dtype=float)
    v1, v2 = cellular_components(x[..., 0], x[..., 1], y[0], y[1])
    return np.stack([v1, v2], axis=-1)


def tilted_velocity(x, y=(0.0, 0.0)):
    x = np.asarray(x, dtype=float)
    v1, v2 = tilted_components(x[..., 0], x[..., 1], y[0], y[1])
    return np.stack([v1, v2], axis=-1)


def stream_function(x1, x2, y1=0.0, y2=0.0):
    return np.sin(x1 - y1) * np.sin(x2 - y2)


def verify_spiral_transform(n):
    """Max residual of v_c(x) - d^-1 R^T v_tilted(d R x) over an n x n grid."""
    x1, x2 = grid_points(n)
    x1, x2 = np.broadcast_arrays(x1, x2)
    points = np.stack([x1, x2], axis=-1)

    lhs = cellular_velocity(points)
    rotated = DILATION * points @ ROTATION.T
    rhs = tilted_velocity(rotated) @ ROTATION / DILATION
    return float(np.abs(lhs - rhs).max())


def sample_velocity(kind, n, y=(0.0, 0.0)):
    """Transform of a velocity field sampled on the n x n grid.

    Returns
    -------
    tuple of SpectralField2D
    """

    x1, x2 = grid_points(n)
    if kind in ("steady_cellular", "random_cellular"):
        v1, v2 = cellular_components(x1, x2, y[0], y[1])
    elif kind == "tilted_cellular":
        v1, v2 = tilted_components(x1, x2, y[0], y[1])
    elif kind == "none":
        v1, v2 = np.zeros((n, n)), np.zeros((n, n))
    else:
        raise ValueError("unknown flow kind {!r}".format(kind))

    shape = (n, n)
    return transform(np.broadcast_to(v1, shape)), transform(np.broadcast_to(v2, shape))


def divergence(v1, v2):
    return spectral_derivative(v1, 0) + spectral_derivative(v2, 1)


def enstrophy(v1, v2):
    """||grad v||_{L2}, the square root of the summed squared derivative norms."""
    total = 0.0
    for component in (v1, v2):
        for axis in (0, 1):
            total += l2_norm(spectral_derivative(component, axis)) ** 2
    return float(np.sqrt(total))


class FlowSpec(object):
    """Velocity model for the scalar solver and the particle integrator.

    Parameters
    ----------
    kind : str
        one of FLOW_KINDS
    shift : ShiftPath, optional
        required for random_cellular; for the steady and tilted kinds a
        given path shifts the cells too, otherwise they are centered at 0
    """

    def __init__(self, kind, shift=None):
        if kind not in FLOW_KINDS:
            raise ValueError("unknown flow kind {!r}".format(kind))
        if kind == "random_cellular" and shift is None:
            raise ValueError("random_cellular flow requires a shift path")
        if shift is not None and not isinstance(shift, ShiftPath):
            raise TypeError("shift must be a ShiftPath")

        self.kind = kind
        self.shift = shift if shift is not None else frozen_path()

    @property
    def max_speed(self):
        # |v| <= 1 for the cellular field, sqrt(2) for the tilted one
        return {"steady_cellular": 1.0, "random_cellular": 1.0, "tilted_cellular": np.sqrt(2.0)}.get(
            self.kind, 0.0
        )

    def center(self, t):
        return self.shift.at(t)

    def components(self, x1, x2, t):
        """Velocity at time t, broadcast over x1 and x2."""
        if self.kind == "none":
            shape = np.broadcast(x1, x2).shape
            return np.zeros(shape), np.zeros(shape)

        y1, y2 = self.center(t)
        if self.kind == "tilted_cellular":
            return tilted_components(x1, x2, y1, y2)
        return cellular_components(x1, x2, y1, y2)

    def __repr__(self):
        return "FlowSpec(kind={!r}, shift={!r})".format(self.kind, self.shift)


__all__ = [
    "FLOW_KINDS",
    "FlowSpec",
    "TWO_PI",
    "cellular_components",
    "cellular_velocity",
    "divergence",
    "enstrophy",
    "sample_velocity",
    "stream_function",
    "tilted_components",
    "tilted_velocity",
    "verify_spiral_transform",
]
