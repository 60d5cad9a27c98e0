"""Two-point fields in tilted coordinates.

The original two-point density f(x, z, y) lives on T^4 x T^2.  With

    x = (x1~ - x3~, x2~ - x4~),  z = (x1~ + x3~, x2~ + x4~),  y~ = (-y2, -y1)

the lattice maps into the lattice, and the diffusivity in the tilted x
directions becomes kappa / 2.
"""

from dataclasses import dataclass
import logging

import numpy as np
from scipy import fft

from cellmix.errors import InvalidDensityError, NonZeroMeanError
from cellmix.flow.shifts import generator
from cellmix.spectral.fields import (
    MEAN_TOL,
    TWO_PI,
    GridField6D,
    check_grid6,
    evaluate,
    inner6,
    l2_norm,
    lattice_samples,
    norm6,
    wavenumbers6,
)


log = logging.getLogger(__name__)

# tolerance on the unit mass of rho0 and on its negative part
DENSITY_TOL = 1e-10


def tilted_kappa(kappa):
    return kappa / 2.0


@dataclass
class TwoPointState:
    """A tilted two-point field with its diffusivities.

    Attributes
    ----------
    f : GridField6D
    kappa_tilde : float
        tilted x diffusivity, kappa / 2
    nu : float
        shift diffusivity
    time : float
    """

    f: GridField6D
    kappa_tilde: float = 0.0
    nu: float = 4.0
    time: float = 0.0

    @property
    def n(self):
        return self.f.n

    @property
    def values(self):
        return self.f.values

    def replace(self, values, time=None):
        return TwoPointState(
            GridField6D(values), self.kappa_tilde, self.nu, self.time if time is None else time
        )


def sample_grid(field, n):
    """Samples of a 2D field on an n x n lattice (any even n)."""
    x = TWO_PI * np.arange(n) / n
    return evaluate(field, x[:, None], x[None, :])


def tilt_product(first, second, density, n):
    """f~[i1..i4, j1, j2] = first(x) * second(z) * density(y) on the tilted lattice.

    Parameters
    ----------
    first, second : ndarray of shape (n, n)
        samples of the two x-factors
    density : ndarray of shape (n, n), or None for the constant 1
    n : int

    Returns
    -------
    ndarray of shape (n,) * 6
    """

    i = np.arange(n)
    i1 = i[:, None, None, None]
    i2 = i[None, :, None, None]
    i3 = i[None, None, :, None]
    i4 = i[None, None, None, :]
    x_part = first[(i1 - i3) % n, (i2 - i4) % n] * second[(i1 + i3) % n, (i2 + i4) % n]

    if density is None:
        return np.broadcast_to(x_part[..., None, None], (n,) * 6).copy()

    j1 = i[:, None]
    j2 = i[None, :]
    y_part = density[(-j2) % n, (-j1) % n]
    return x_part[..., None, None] * y_part[None, None, None, None]


def check_density(rho0):
    """Raise InvalidDensityError unless rho0 >= 0 with unit mass."""
    mass = TWO_PI ** 2 * rho0.mean
    if abs(mass - 1.0) > DENSITY_TOL:
        raise InvalidDensityError("shift density must have unit mass, got {:.12g}".format(mass))

    values = rho0.to_grid()
    if values.min() < -DENSITY_TOL:
        raise InvalidDensityError(
            "shift density must be nonnegative, minimum is {:.3e}".format(values.min())
        )


def uniform_density(n):
    """Samples of the uniform density (2 pi)^-2."""
    return np.full((n, n), TWO_PI ** -2)


def build_initial(theta0, rho0=None, n=12, kappa=0.0, nu=4.0):
    """Two-point initial datum theta0(x) theta0(z) rho0(y) in tilted coordinates.

    theta0 is resampled spectrally onto the n-lattice, dropping its modes with
    |k_i| >= n/2 instead of aliasing them, which makes the x~-mean exactly zero.

    Parameters
    ----------
    theta0 : SpectralField2D
        mean-zero
    rho0 : SpectralField2D, optional (default: uniform)
        probability density of the initial shift
    n : int
        lattice size, one of 8, 12, 16
    kappa : float
        scalar diffusivity in original coordinates
    nu : float

    Returns
    -------
    TwoPointState
    """

    check_grid6(n)
    if abs(theta0.mean) * TWO_PI > MEAN_TOL * max(l2_norm(theta0), np.finfo(float).tiny):
        raise NonZeroMeanError("theta0 must be mean-zero, mean is {:.3e}".format(theta0.mean))

    theta = lattice_samples(theta0, n)
    if rho0 is None:
        density = uniform_density(n)
    else:
        check_density(rho0)
        density = sample_grid(rho0, n)

    values = tilt_product(theta, theta, density, n)
    log.debug("Built two-point datum on {:,} lattice points".format(values.size))
    return TwoPointState(GridField6D(values), tilted_kappa(kappa), nu)


def x_mean(values):
    """Average over the four x~ axes, an (n, n) array over y~."""
    return values.mean(axis=(0, 1, 2, 3))


def max_x_mean(values):
    return float(np.abs(x_mean(values)).max())


def pi_shift(values, axis):
    """Shift by pi along (x1~, x3~) for axis=0 or (x2~, x4~) for axis=1."""
    n = values.shape[0]
    axes = (0, 2) if axis == 0 else (1, 3)
    return np.roll(values, (n // 2, n // 2), axis=axes)


def pi_shift_error(values):
    """Max deviation from the pi-shift symmetry in both pairs."""
    return max(float(np.abs(pi_shift(values, axis) - values).max()) for axis in (0, 1))


def pi_shift_average(values, axis):
    """1/2 (g + g shifted by pi), which is pi-periodic in the chosen pair."""
    return 0.5 * (values + pi_shift(values, axis))


def pair_observable(state, h):
    """Integral of h(x) h(z) f(x, z, y), equal to E <h, theta(t)>^2."""
    samples = sample_grid(h, state.n)
    observable = tilt_product(samples, samples, None, state.n)
    return inner6(observable, state.values)


def random_two_point(n, seed=0, index=0, kmax=1, nu=4.0, kappa=0.0):
    """Random band-limited x~-mean-zero two-point state.

    Gaussian lattice noise is filtered to |k_i| <= kmax on every axis, the
    modes with k_x = 0 are removed and the result is scaled to unit L2 norm.
    """

    check_grid6(n)
    rng = generator(seed, index, "samples")
    coeffs = fft.rfftn(rng.standard_normal((n,) * 6))

    ks = wavenumbers6(n)
    band = np.ones(coeffs.shape, dtype=bool)
    for k in ks:
        band &= np.abs(k) <= kmax
    x_zero = np.ones(coeffs.shape, dtype=bool)
    for k in ks[:4]:
        x_zero &= k == 0
    coeffs[~band | x_zero] = 0

    values = fft.irfftn(coeffs, s=(n,) * 6)
    values /= norm6(values)
    return TwoPointState(GridField6D(values), tilted_kappa(kappa), nu)
