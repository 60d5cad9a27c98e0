"""Time-averaged scalar spectrum under white-in-time forcing.

The forced equation

    d theta + v . grad theta dt = kappa Lap theta dt + F dW

is stepped with the scalar solver and an additive sqrt(dt) noise increment
supported on the forcing annulus.  After spin-up, |theta_hat|^2 is averaged
in time and summed over annuli r <= |k| < r + h.
"""

from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd
from scipy.stats import linregress

from cellmix.flow.shifts import generator, sample_shift_path, step_count
from cellmix.flow.velocity import FlowSpec
from cellmix.scalar.solver import grid_velocity, step
from cellmix.spectral.fields import (
    TWO_PI,
    SpectralField2D,
    half_weights,
    transform,
    wavenumbers,
)


log = logging.getLogger(__name__)


@dataclass
class Forcing:
    """Band-limited forcing on kmin <= |k| <= kmax with per-mode amplitude."""

    kmin: float = 1.0
    kmax: float = 2.0
    amplitude: float = 1.0

    def mask(self, n):
        k1, k2 = wavenumbers(n)
        radius = np.sqrt(k1 ** 2 + k2 ** 2)
        return (radius >= self.kmin) & (radius <= self.kmax)


@dataclass
class SpectrumResult:
    """Annulus sums and their log-log slope.

    Attributes
    ----------
    spectrum : pandas.DataFrame
        columns r, energy
    slope : float
        log-log slope of energy against r over fit_range
    fit_range : (float, float)
    samples : int
        number of time samples averaged
    """

    spectrum: pd.DataFrame
    slope: float
    fit_range: tuple
    samples: int


def mode_power(field):
    """(2 pi)^2 |theta_hat|^2 per half-spectrum entry, doubled for conjugate pairs."""
    return TWO_PI ** 2 * half_weights(field.n) * np.abs(field.coeffs) ** 2


def annulus_sums(power, width=1.0):
    """Sum power over annuli r <= |k| < r + width for r = 0, width, 2 width, ..."""
    n = power.shape[0]
    k1, k2 = wavenumbers(n)
    radius = np.broadcast_to(np.sqrt(k1 ** 2 + k2 ** 2), power.shape)
    bins = np.floor(radius / width).astype(int)
    sums = np.bincount(bins.ravel(), weights=power.ravel())
    return pd.DataFrame({"r": np.arange(len(sums)) * width, "energy": sums})


def spectral_slope(spectrum, r_min, r_max):
    inside = spectrum.loc[
        (spectrum["r"] >= r_min) & (spectrum["r"] <= r_max) & (spectrum["energy"] > 0)
    ]
    if len(inside) < 2:
        return np.nan
    return float(linregress(np.log(inside["r"]), np.log(inside["energy"])).slope)


def batchelor_spectrum(
    forcing,
    kappa,
    t_final,
    n=128,
    dt=1e-2,
    flow=None,
    nu=4.0,
    seed=0,
    spin_up=0.5,
    width=1.0,
    sample_every=10,
    fit_range=None,
):
    """Time-averaged annulus-summed spectrum of a forced scalar.

    Parameters
    ----------
    forcing : Forcing
    kappa : float
    t_final : float
    n : int, optional (default: 128)
    dt : float, optional (default: 1e-2)
    flow : FlowSpec, optional
        defaults to the random cellular flow with diffusivity nu
    nu : float, optional (default: 4)
    seed : int, optional (default: 0)
    spin_up : float, optional (default: 0.5)
        share of the horizon discarded before averaging
    width : float, optional (default: 1)
        annulus width h
    sample_every : int, optional (default: 10)
        steps between time samples
    fit_range : (float, float), optional
        r range for the slope; defaults to [2 kmax_forcing, n / 3]

    Returns
    -------
    SpectrumResult
    """

    if flow is None:
        flow = FlowSpec("random_cellular", sample_shift_path(nu, dt, t_final, seed))

    velocity = grid_velocity(flow, n)
    noise = generator(seed, 0, "forcing")
    mask = forcing.mask(n)
    scale = forcing.amplitude * n * np.sqrt(dt)

    steps = step_count(t_final, dt)
    start = int(spin_up * steps)
    theta = SpectralField2D.zeros(n)
    total = np.zeros(mask.shape)
    samples = 0

    for i in range(steps):
        theta = step(theta, velocity, kappa, dt, i * dt)
        kick = transform(noise.standard_normal((n, n))).coeffs * mask * scale
        theta = theta + SpectralField2D(kick)
        if i >= start and (i - start) % sample_every == 0:
            total += mode_power(theta)
            samples += 1

    spectrum = annulus_sums(total / max(samples, 1), width)
    if fit_range is None:
        fit_range = (2 * forcing.kmax, n / 3.0)
    slope = spectral_slope(spectrum, *fit_range)
    log.info(
        "Spectrum from {:,} samples on n={}: slope {:.3f} on r in [{}, {}]".format(
            samples, n, slope, *fit_range
        )
    )
    return SpectrumResult(spectrum, slope, tuple(fit_range), samples)
