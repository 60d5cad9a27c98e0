"""Pseudo-spectral integrator for the passive scalar equation

    d_t theta + v . grad theta = kappa Laplacian theta

on the 2D torus.  Each step is Strang split: half a step of exact diffusion
in coefficient space, a full RK4 advection step on the dealiased product
-v . grad theta, then the second diffusion half step.
"""

from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache
import hashlib
import json
import logging
import warnings

import numpy as np
import pandas as pd
from scipy import fft

from cellmix.errors import CFLWarning, NumericalBlowupError
from cellmix.flow.shifts import sample_shift_path, step_count
from cellmix.flow.velocity import FlowSpec
from cellmix.scalar.initial import ensure_mean_zero, make_theta0
from cellmix.spectral.fields import (
    TWO_PI,
    SpectralField2D,
    check_grid,
    dealias_mask,
    grid_points,
    l2_norm,
    nyquist_mask,
    project_mean_zero,
    sobolev_norm,
    wavenumbers,
)


log = logging.getLogger(__name__)

NORM_COLUMNS = ["t", "h_minus1", "h_minus2", "l2", "h1", "mean", "realization"]


@lru_cache(maxsize=8)
def _multipliers(n):
    k1, k2 = wavenumbers(n)
    keep = nyquist_mask(n)
    ik1 = np.where(keep, 1j * k1, 0)
    ik2 = np.where(keep, 1j * k2, 0)
    return ik1, ik2, dealias_mask(n), k1 ** 2 + k2 ** 2


def cfl_limit(n, max_speed):
    """Largest advective step, 0.5 * (2 pi / n) / max|v|."""
    if max_speed <= 0:
        return np.inf
    return 0.5 * (TWO_PI / n) / max_speed


def diffusion_factor(n, kappa, dt):
    """exp(-kappa |k|^2 dt) on the half spectrum."""
    ksq = _multipliers(n)[3]
    return np.exp(-kappa * ksq * dt)


def _advection(coeffs, v1, v2, n):
    """Half-spectrum coefficients of the dealiased -v . grad theta."""
    ik1, ik2, mask, _ = _multipliers(n)
    scale = n * n
    d1 = fft.irfft2(coeffs * ik1 * scale, s=(n, n))
    d2 = fft.irfft2(coeffs * ik2 * scale, s=(n, n))
    return -mask * fft.rfft2(v1 * d1 + v2 * d2) / scale


def grid_velocity(flow, n):
    """Velocity sampler t -> (v1, v2) on the n x n grid, or None for no flow.

    Parameters
    ----------
    flow : FlowSpec or None
    n : int

    Returns
    -------
    callable or None
    """

    if flow is None or flow.kind == "none":
        return None

    x1, x2 = grid_points(n)

    def velocity(t):
        return flow.components(x1, x2, t)

    return velocity


def step(theta, velocity, kappa, dt, t=0.0):
    """Advance theta by one Strang-split step.

    Parameters
    ----------
    theta : SpectralField2D
    velocity : callable or None
        velocity(t) returns grid samples (v1, v2); None means no advection
    kappa : float
        diffusivity, >= 0
    dt : float
        step; negative steps are allowed only for kappa = 0
    t : float, optional (default: 0)
        time at the start of the step

    Returns
    -------
    SpectralField2D
    """

    if kappa < 0:
        raise ValueError("diffusivity must be nonnegative, got {}".format(kappa))
    if dt < 0 and kappa > 0:
        raise ValueError("backward steps are only defined for kappa = 0")

    n = theta.n
    half = diffusion_factor(n, kappa, dt / 2) if kappa > 0 else 1.0
    coeffs = theta.coeffs * half

    if velocity is not None:
        v1, v2 = velocity(t)
        speed = np.sqrt(v1 ** 2 + v2 ** 2).max()
        if abs(dt) > cfl_limit(n, speed):
            warnings.warn(
                "dt={} exceeds the advective limit {:.3e}".format(dt, cfl_limit(n, speed)),
                CFLWarning,
            )

        r1 = _advection(coeffs, v1, v2, n)
        v1, v2 = velocity(t + dt / 2)
        r2 = _advection(coeffs + (dt / 2) * r1, v1, v2, n)
        r3 = _advection(coeffs + (dt / 2) * r2, v1, v2, n)
        v1, v2 = velocity(t + dt)
        r4 = _advection(coeffs + dt * r3, v1, v2, n)
        coeffs = coeffs + (dt / 6) * (r1 + 2 * r2 + 2 * r3 + r4)

    coeffs = coeffs * half
    if not np.isfinite(coeffs).all():
        raise NumericalBlowupError("scalar field blew up at t={:.6g}".format(t + dt))

    return SpectralField2D(coeffs)


def advance_field(theta, flow, kappa, dt, steps, t0=0.0):
    """Apply `steps` steps starting at time t0 (dt may be negative at kappa = 0)."""
    velocity = grid_velocity(flow, theta.n)
    for i in range(steps):
        theta = step(theta, velocity, kappa, dt, t0 + i * dt)
    return theta


def norms(theta):
    """H^-1, H^-2, L2 and H^1 norms together with the grid mean."""
    centered = project_mean_zero(theta)
    return {
        "h_minus1": sobolev_norm(centered, -1),
        "h_minus2": sobolev_norm(centered, -2),
        "l2": l2_norm(theta),
        "h1": sobolev_norm(theta, 1),
        "mean": theta.mean,
    }


@dataclass
class SimulationConfig:
    """Parameters of one scalar run.

    theta0 is either the name of a preset (see cellmix.scalar.initial) or an
    explicit SpectralField2D.
    """

    n: int
    kappa: float
    dt: float
    t_final: float
    flow: FlowSpec = dataclass_field(default_factory=lambda: FlowSpec("none"))
    theta0: object = "sine"
    record_every: int = 100
    kmax: int = 4
    seed: int = 0
    realization: int = 0

    def __post_init__(self):
        check_grid(self.n)
        if self.kappa < 0:
            raise ValueError("diffusivity must be nonnegative, got {}".format(self.kappa))
        if self.dt == 0 or (self.dt < 0 and self.kappa > 0):
            raise ValueError("invalid time step {} for kappa={}".format(self.dt, self.kappa))
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")

        limit = cfl_limit(self.n, self.flow.max_speed)
        if self.kappa == 0 and abs(self.dt) > limit:
            warnings.warn(
                "dt={} exceeds the advective limit {:.3e}".format(self.dt, limit), CFLWarning
            )

    @classmethod
    def from_settings(cls, settings, realization=0):
        """Build a config for one realization from resolved flat settings."""
        kind = settings["flow.kind"]
        shift = None
        if kind == "random_cellular":
            shift = sample_shift_path(
                settings["flow.nu"],
                settings["run.dt"],
                settings["run.t_final"],
                settings["flow.seed"],
                index=realization,
                origin=settings["flow.y0"],
            )

        return cls(
            n=settings["grid.n"],
            kappa=settings["scalar.kappa"],
            dt=settings["run.dt"],
            t_final=settings["run.t_final"],
            flow=FlowSpec(kind, shift),
            theta0=settings["scalar.theta0"],
            record_every=settings["run.record_every"],
            kmax=settings["scalar.kmax"],
            seed=settings["run.seed"],
            realization=realization,
        )

    def initial(self):
        if isinstance(self.theta0, SpectralField2D):
            return self.theta0
        return make_theta0(self.theta0, self.n, self.kmax, self.seed, self.realization)

    def to_dict(self):
        shift = self.flow.shift
        return {
            "n": self.n,
            "kappa": self.kappa,
            "dt": self.dt,
            "t_final": self.t_final,
            "flow": {"kind": self.flow.kind, "nu": shift.nu, "seed": shift.seed},
            "theta0": self.theta0 if isinstance(self.theta0, str) else "custom",
            "record_every": self.record_every,
            "kmax": self.kmax,
            "seed": self.seed,
            "realization": self.realization,
        }

    def config_hash(self):
        """First 16 hex digits of the BLAKE2b digest of the canonical JSON."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.blake2b(text.encode("utf-8")).hexdigest()[:16]


def solve(config, on_record=None):
    """Integrate one realization and record norms.

    Parameters
    ----------
    config : SimulationConfig
    on_record : callable, optional
        called as on_record(t, theta) at every record, e.g. to write snapshots

    Returns
    -------
    pandas.DataFrame
        NormSeries with columns t, h_minus1, h_minus2, l2, h1, mean,
        realization;
        attrs["config_hash"] identifies the configuration
    """

    theta = ensure_mean_zero(config.initial())
    velocity = grid_velocity(config.flow, config.n)
    steps = step_count(config.t_final, config.dt)

    records = []
    for i in range(steps + 1):
        t = i * config.dt
        if i % config.record_every == 0 or i == steps:
            record = norms(theta)
            record["t"] = t
            record["realization"] = config.realization
            records.append(record)
            if on_record is not None:
                on_record(t, theta)

        if i < steps:
            theta = step(theta, velocity, config.kappa, config.dt, t)

    log.debug(
        "Integrated {:,} steps, {:,} records (realization {})".format(
            steps, len(records), config.realization
        )
    )

    series = pd.DataFrame(records, columns=NORM_COLUMNS)
    series.attrs["config_hash"] = config.config_hash()
    return series
