"""Particle paths of the stochastic flow

    dX_t = v(X_t, Y_t) dt + sqrt(2 kappa) dB_t

together with Feynman-Kac estimates of the scalar and Monte-Carlo
correlations.  Particle noise is drawn from the "particles" stream; the shift
Y_t is an independent ShiftPath carried by the FlowSpec.
"""

from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from cellmix.errors import NonZeroMeanError
from cellmix.flow.shifts import ShiftPath, split_seed, step_count
from cellmix.flow.velocity import FlowSpec
from cellmix.spectral.fields import (
    MEAN_TOL,
    TWO_PI,
    evaluate,
    grid_points,
    l2_norm,
)


log = logging.getLogger(__name__)

SCHEMES = ("euler", "rk4")


@dataclass
class ParticleEnsemble:
    """M particles on the torus.

    Attributes
    ----------
    positions : ndarray of shape (M, 2)
        wrapped to [0, 2 pi)
    kappa : float
        particle diffusivity
    seed : int
        base seed of the particle noise
    time : float
    steps : int
        steps taken so far; keys the noise of the next step
    """

    positions: np.ndarray
    kappa: float = 0.0
    seed: int = 0
    time: float = 0.0
    steps: int = 0

    def __post_init__(self):
        positions = np.array(self.positions, dtype=np.float64).reshape(-1, 2)
        if len(positions) < 1:
            raise ValueError("an ensemble needs at least one particle")
        if self.kappa < 0:
            raise ValueError("diffusivity must be nonnegative, got {}".format(self.kappa))
        self.positions = np.mod(positions, TWO_PI)

    @property
    def size(self):
        return len(self.positions)


def uniform_ensemble(m, kappa=0.0, seed=0):
    """m particles drawn uniformly on the torus from the "samples" stream."""
    rng = np.random.Generator(np.random.Philox(split_seed(seed, 0, "samples")))
    return ParticleEnsemble(rng.uniform(0, TWO_PI, size=(m, 2)), kappa=kappa, seed=seed)


def grid_ensemble(n, per_node=1, kappa=0.0, seed=0):
    """per_node particles on every node of the n x n grid, node-major order."""
    x1, x2 = grid_points(n)
    x1, x2 = np.broadcast_arrays(x1, x2)
    nodes = np.stack([x1.ravel(), x2.ravel()], axis=-1)
    return ParticleEnsemble(np.repeat(nodes, per_node, axis=0), kappa=kappa, seed=seed)


def _noise(seed, step, m):
    # one Philox block per step: the step number sits in the top counter word
    counter = np.array([0, 0, 0, step], dtype=np.uint64)
    bits = np.random.Philox(key=split_seed(seed, 0, "particles"), counter=counter)
    return np.random.Generator(bits).standard_normal((m, 2))


def _as_flow(flow):
    if isinstance(flow, ShiftPath):
        return FlowSpec("random_cellular", flow)
    if flow is None:
        return FlowSpec("none")
    return flow


def _drift(flow, reverse_from=None):
    """Drift (x, t) -> velocity; with reverse_from=T it is -v(x, T - t)."""

    def forward(x, t):
        v1, v2 = flow.components(x[:, 0], x[:, 1], t)
        return np.stack([v1, v2], axis=-1)

    if reverse_from is None:
        return forward

    def backward(x, t):
        return -forward(x, reverse_from - t)

    return backward


def _move(x, drift, t, h, scheme):
    if scheme == "euler":
        return x + h * drift(x, t)

    k1 = drift(x, t)
    k2 = drift(x + (h / 2) * k1, t + h / 2)
    k3 = drift(x + (h / 2) * k2, t + h / 2)
    k4 = drift(x + h * k3, t + h)
    return x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _integrate(ensemble, drift, dt, t_final, scheme, on_time=None):
    if not dt > 0:
        raise ValueError("time step must be positive, got {}".format(dt))
    if scheme not in SCHEMES:
        raise ValueError("unknown scheme {!r}".format(scheme))

    span = t_final - ensemble.time
    steps = step_count(span, dt)
    if steps == 0:
        return ensemble
    h = span / steps

    x = ensemble.positions.copy()
    t = ensemble.time
    sigma = np.sqrt(2 * ensemble.kappa * h)
    for i in range(steps):
        x = _move(x, drift, t, h, scheme)
        if ensemble.kappa > 0:
            x += sigma * _noise(ensemble.seed, ensemble.steps + i, len(x))
        x = np.mod(x, TWO_PI)
        t = ensemble.time + (i + 1) * h
        if on_time is not None:
            on_time(t, x)

    return ParticleEnsemble(
        x, kappa=ensemble.kappa, seed=ensemble.seed, time=t_final, steps=ensemble.steps + steps
    )


def advance(ensemble, flow, dt, t_final, scheme="euler"):
    """Integrate the particle SDE up to time t_final.

    The default is Euler-Maruyama, X <- X + v(X, t) h + sqrt(2 kappa h) xi.
    scheme="rk4" steps the drift with classical RK4 instead and adds the
    same Brownian increment.  The step is shrunk slightly so that it divides
    t_final - ensemble.time.

    Parameters
    ----------
    ensemble : ParticleEnsemble
    flow : FlowSpec or ShiftPath
        a bare ShiftPath means the random cellular flow along that path
    dt : float
        step, > 0
    t_final : float
        absolute end time
    scheme : {"euler", "rk4"}, optional (default: "euler")

    Returns
    -------
    ParticleEnsemble
    """

    flow = _as_flow(flow)
    return _integrate(ensemble, _drift(flow), dt, t_final, scheme)


def _check_mean_zero(field, name):
    if abs(field.mean) * TWO_PI > MEAN_TOL * max(l2_norm(field), np.finfo(float).tiny):
        raise NonZeroMeanError("{} must be mean-zero, mean is {:.3e}".format(name, field.mean))


def feynman_kac_estimate(theta0, points, flow, t, kappa, m, seed=0, dt=1e-3, scheme="euler"):
    """Monte-Carlo estimate of theta(t, x) = E theta0(X_t^{-1}(x)).

    From each evaluation point, m backward characteristics
    dZ_s = -v(Z_s, t - s) ds + sqrt(2 kappa) dB_s are integrated over
    s in [0, t] and theta0 is averaged over their end points.

    Parameters
    ----------
    theta0 : SpectralField2D
    points : array-like of shape (P, 2)
    flow : FlowSpec or ShiftPath
    t : float
    kappa : float
    m : int
        characteristics per point, >= 1
    seed : int, optional (default: 0)
    dt : float, optional (default: 1e-3)
    scheme : {"euler", "rk4"}, optional (default: "euler")

    Returns
    -------
    pandas.DataFrame
        columns x1, x2, estimate, stderr
    """

    if m < 1:
        raise ValueError("need at least one characteristic per point, got {}".format(m))
    if kappa == 0 and m > 1:
        raise ValueError(
            "without diffusion all characteristics coincide, m must be 1, got {}".format(m)
        )

    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    flow = _as_flow(flow)
    ensemble = ParticleEnsemble(np.repeat(points, m, axis=0), kappa=kappa, seed=seed)
    ensemble = _integrate(ensemble, _drift(flow, reverse_from=t), dt, t, scheme)

    values = evaluate(theta0, ensemble.positions[:, 0], ensemble.positions[:, 1])
    values = values.reshape(len(points), m)
    estimate = values.mean(axis=1)
    if m > 1:
        stderr = values.std(axis=1, ddof=1) / np.sqrt(m)
    else:
        stderr = np.zeros(len(points))

    log.debug("Feynman-Kac estimate at {:,} points from {:,} paths".format(len(points), values.size))
    return pd.DataFrame(
        {"x1": points[:, 0], "x2": points[:, 1], "estimate": estimate, "stderr": stderr}
    )


def correlation_series(h, g, flow, times, kappa, m=1, seed=0, dt=1e-3, scheme="euler"):
    """|integral g(x) E h(X_t(x)) dx| at each of the given times.

    Particles start at the nodes of g's grid (m per node) and are pushed
    forward once; the integral is taken by grid quadrature.

    Parameters
    ----------
    h, g : SpectralField2D
        mean-zero
    flow : FlowSpec or ShiftPath
    times : sequence of float
        nondecreasing, >= 0
    kappa : float
    m : int, optional (default: 1)
        particles per node

    Returns
    -------
    pandas.DataFrame
        columns t, correlation
    """

    _check_mean_zero(h, "h")
    _check_mean_zero(g, "g")
    if m < 1:
        raise ValueError("need at least one particle per node, got {}".format(m))

    n = g.n
    weights = g.to_grid().ravel()
    flow = _as_flow(flow)

    def quadrature(x):
        values = evaluate(h, x[:, 0], x[:, 1]).reshape(n * n, m).mean(axis=1)
        return abs(TWO_PI ** 2 * np.mean(weights * values))

    ensemble = grid_ensemble(n, m, kappa=kappa, seed=seed)
    drift = _drift(flow)

    records = []
    for t in times:
        ensemble = _integrate(ensemble, drift, dt, t, scheme)
        records.append({"t": t, "correlation": quadrature(ensemble.positions)})

    return pd.DataFrame(records, columns=["t", "correlation"])


def correlation(h, g, flow, t, kappa, m=1, seed=0, dt=1e-3, scheme="euler"):
    """Cor_{X_t}(h, g) = |integral g(x) E h(X_t(x)) dx|, forward particles."""
    series = correlation_series(h, g, flow, [t], kappa, m, seed, dt, scheme)
    return float(series["correlation"].iloc[0])


def backward_correlation(h, g, flow, t, kappa, m=1, seed=0, dt=1e-3, scheme="euler"):
    """The same correlation computed from backward characteristics.

    integral h(y) E g(X_t^{-1}(y)) dy, with the inner expectation from
    feynman_kac_estimate at the nodes of h's grid.
    """

    _check_mean_zero(h, "h")
    _check_mean_zero(g, "g")

    n = h.n
    x1, x2 = grid_points(n)
    x1, x2 = np.broadcast_arrays(x1, x2)
    points = np.stack([x1.ravel(), x2.ravel()], axis=-1)
    estimate = feynman_kac_estimate(g, points, flow, t, kappa, m, seed, dt, scheme)
    return abs(TWO_PI ** 2 * np.mean(h.to_grid().ravel() * estimate["estimate"].values))
