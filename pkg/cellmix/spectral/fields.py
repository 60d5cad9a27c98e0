"""Scalar fields on the periodic grids used throughout cellmix.

Grid points are x_j = 2*pi*j/n along every axis.  Fourier coefficients are
normalized so that

    f_hat(k) = (2*pi)**-d * integral(f(x) exp(-i k.x) dx)

with integer wave numbers k.  Real 2D fields are stored as real-to-complex
half spectra (axis 0 full, axis 1 half), so every coefficient in a column
1 <= k2 < n/2 stands for itself and its complex conjugate.
"""

import numpy as np
from scipy import fft

from cellmix.errors import NonZeroMeanError, UnsupportedGridError


TWO_PI = 2 * np.pi

# relative tolerance for the k=0 coefficient of fields that must be mean-zero
MEAN_TOL = 1e-10

# grid sizes for the 6D two-point lattice
GRID6_SIZES = (8, 12, 16)


def check_grid(n):
    """Raise UnsupportedGridError unless n is a power of two of at least 4."""
    if not isinstance(n, (int, np.integer)) or n < 4 or n & (n - 1):
        raise UnsupportedGridError("2D grid size must be a power of two >= 4, got {}".format(n))


def check_grid6(n):
    """Raise UnsupportedGridError unless n is a supported 6D lattice size."""
    if n not in GRID6_SIZES:
        raise UnsupportedGridError(
            "6D grid size must be one of {}, got {}".format(GRID6_SIZES, n)
        )


def grid_points(n):
    """Grid coordinates broadcastable to an (n, n) array.

    Returns
    -------
    tuple of ndarray
        x1 with shape (n, 1) and x2 with shape (1, n)
    """

    x = TWO_PI * np.arange(n) / n
    return x[:, None], x[None, :]


def wavenumbers(n):
    """Integer wave numbers of the 2D half spectrum.

    Returns
    -------
    tuple of ndarray
        k1 with shape (n, 1) and k2 with shape (1, n // 2 + 1)
    """

    k1 = fft.fftfreq(n, 1.0 / n)[:, None]
    k2 = fft.rfftfreq(n, 1.0 / n)[None, :]
    return k1, k2


def half_weights(n):
    """Multiplicity of each half-spectrum column in the full spectrum."""
    weights = np.full((1, n // 2 + 1), 2.0)
    weights[0, 0] = 1.0
    weights[0, -1] = 1.0
    return weights


def nyquist_mask(n):
    """False on the Nyquist row and column of the half spectrum."""
    k1, k2 = wavenumbers(n)
    return (np.abs(k1) < n / 2) & (k2 < n / 2)


def dealias_mask(n):
    """2/3-rule mask of the half spectrum: keep |k_i| < n/3 on both axes."""
    k1, k2 = wavenumbers(n)
    return (np.abs(k1) < n / 3.0) & (k2 < n / 3.0)


class SpectralField2D(object):
    """Half-spectrum Fourier coefficients of a real scalar on the 2D torus.

    Instances are treated as immutable values; the coefficient array is
    read-only.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, coeffs):
        coeffs = np.array(coeffs, dtype=np.complex128)
        if coeffs.ndim != 2 or coeffs.shape[1] != coeffs.shape[0] // 2 + 1:
            raise UnsupportedGridError(
                "half-spectrum shape must be (n, n//2+1), got {}".format(coeffs.shape)
            )
        check_grid(coeffs.shape[0])
        coeffs.setflags(write=False)
        self.n = coeffs.shape[0]
        self.coeffs = coeffs

    @classmethod
    def from_grid(cls, values):
        return transform(values)

    @classmethod
    def from_function(cls, func, n):
        """Sample func(x1, x2) on the n x n grid and transform."""
        x1, x2 = grid_points(n)
        return transform(np.broadcast_to(func(x1, x2), (n, n)))

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((n, n // 2 + 1), dtype=np.complex128))

    def to_grid(self):
        return inverse(self)

    @property
    def mean(self):
        """Grid average, equal to the k=0 coefficient."""
        return self.coeffs[0, 0].real

    def scaled(self, factor):
        return SpectralField2D(self.coeffs * factor)

    def __add__(self, other):
        return SpectralField2D(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return SpectralField2D(self.coeffs - other.coeffs)

    def __repr__(self):
        return "SpectralField2D(n={})".format(self.n)


def transform(values):
    """Forward transform of real grid samples.

    Parameters
    ----------
    values : ndarray of shape (n, n)
        real samples on the uniform grid

    Returns
    -------
    SpectralField2D
    """

    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise UnsupportedGridError("expected a square 2D grid, got {}".format(values.shape))
    check_grid(values.shape[0])
    n = values.shape[0]
    return SpectralField2D(fft.rfft2(values) / (n * n))


def inverse(field):
    """Real grid samples of a SpectralField2D."""
    n = field.n
    return fft.irfft2(field.coeffs * (n * n), s=(n, n))


def l2_norm(field):
    """L2 norm over the torus, via Parseval."""
    weights = half_weights(field.n)
    return TWO_PI * np.sqrt(np.sum(weights * np.abs(field.coeffs) ** 2))


def inner(field_a, field_b):
    """L2 inner product over the torus."""
    weights = half_weights(field_a.n)
    return TWO_PI ** 2 * np.sum(weights * (field_a.coeffs * np.conj(field_b.coeffs)).real)


def sobolev_norm(field, s, tol=MEAN_TOL):
    """Homogeneous Sobolev norm of order s.

    ||f||_s = (sum_{k != 0} |k|^{2s} (2 pi)^2 |f_hat(k)|^2)^{1/2}

    Parameters
    ----------
    field : SpectralField2D
    s : float
        order in [-4, 4]
    tol : float, optional (default: 1e-10)
        for s < 0, maximum |f_hat(0)| relative to the L2 norm

    Returns
    -------
    float
    """

    if not -4 <= s <= 4:
        raise ValueError("Sobolev order must lie in [-4, 4], got {}".format(s))

    coeffs = field.coeffs
    if s < 0:
        scale = l2_norm(field)
        if abs(coeffs[0, 0]) * TWO_PI > tol * max(scale, np.finfo(float).tiny):
            raise NonZeroMeanError(
                "H^{} norm needs a mean-zero field, mean is {:.3e}".format(s, coeffs[0, 0].real)
            )

    k1, k2 = wavenumbers(field.n)
    ksq = k1 ** 2 + k2 ** 2
    ksq[0, 0] = 1.0
    power = half_weights(field.n) * np.abs(coeffs) ** 2
    power[0, 0] = 0.0
    return TWO_PI * np.sqrt(np.sum(ksq ** s * power))


def spectral_derivative(field, axis):
    """First derivative along axis 0 (x1) or 1 (x2).

    The Nyquist mode is dropped so the operator stays skew-symmetric.
    """

    k1, k2 = wavenumbers(field.n)
    k = k1 if axis == 0 else k2
    multiplier = np.where(nyquist_mask(field.n), 1j * k, 0)
    return SpectralField2D(field.coeffs * multiplier)


def laplacian(field):
    k1, k2 = wavenumbers(field.n)
    return SpectralField2D(-(k1 ** 2 + k2 ** 2) * field.coeffs)


def gradient_grid(field):
    """Grid samples of (d1 f, d2 f)."""
    return (
        inverse(spectral_derivative(field, 0)),
        inverse(spectral_derivative(field, 1)),
    )


def project_mean_zero(field):
    coeffs = np.array(field.coeffs)
    coeffs[0, 0] = 0
    return SpectralField2D(coeffs)


def dealias(field):
    return SpectralField2D(field.coeffs * dealias_mask(field.n))


def _resampled_coeffs(field, n):
    src = field.n
    keep = min(src, n) // 2
    out = np.zeros((n, n // 2 + 1), dtype=np.complex128)
    # rows 0..keep-1 and the negative rows -keep+1..-1
    out[:keep, :keep] = field.coeffs[:keep, :keep]
    out[n - keep + 1 :, :keep] = field.coeffs[src - keep + 1 :, :keep]
    return out


def resample(field, n):
    """Spectral resampling onto an n x n grid.

    Modes with |k_i| >= n/2 are dropped on the way down, and the Nyquist
    modes of the target grid are always left empty.
    """

    check_grid(n)
    return SpectralField2D(_resampled_coeffs(field, n))


def lattice_samples(field, n):
    """Samples of the field resampled onto an n x n lattice, for any even n >= 4.

    Same truncation as resample, so modes with |k_i| >= n/2 are dropped
    instead of aliasing.
    """

    if not isinstance(n, (int, np.integer)) or n < 4 or n % 2:
        raise UnsupportedGridError("lattice size must be even and >= 4, got {}".format(n))
    return fft.irfft2(_resampled_coeffs(field, n) * n * n, s=(n, n))


def evaluate(field, x1, x2, tol=1e-14):
    """Evaluate the Fourier series at arbitrary points.

    Only coefficients above tol relative to the largest one take part, so
    band-limited fields are evaluated cheaply at many points.

    Parameters
    ----------
    field : SpectralField2D
    x1, x2 : ndarray
        point coordinates, broadcast against each other

    Returns
    -------
    ndarray
    """

    coeffs = field.coeffs * half_weights(field.n)
    coeffs = np.where(nyquist_mask(field.n), coeffs, 0)
    scale = np.abs(coeffs).max()
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    if scale == 0:
        return np.zeros(x1.shape)

    rows, cols = np.nonzero(np.abs(coeffs) > tol * scale)
    k1, k2 = wavenumbers(field.n)
    out = np.zeros(x1.shape)
    for row, col in zip(rows, cols):
        phase = k1[row, 0] * x1 + k2[0, col] * x2
        out += (coeffs[row, col] * np.exp(1j * phase)).real
    return out


def random_bandlimited(n, kmax, seed):
    """Random real mean-zero field with |k1|, |k2| <= kmax.

    Parameters
    ----------
    n : int
        grid size
    kmax : int
        bandwidth, must be below n/2
    seed : int

    Returns
    -------
    SpectralField2D
        normalized to unit L2 norm
    """

    if not 1 <= kmax < n // 2:
        raise ValueError("kmax must lie in [1, n/2), got {}".format(kmax))
    rng = np.random.Generator(np.random.Philox(seed))
    values = rng.standard_normal((n, n))
    field = transform(values)
    k1, k2 = wavenumbers(n)
    band = (np.abs(k1) <= kmax) & (k2 <= kmax)
    field = project_mean_zero(SpectralField2D(field.coeffs * band))
    return field.scaled(1.0 / l2_norm(field))


### 6D lattice helpers


class GridField6D(object):
    """Real samples on the uniform 6D lattice, axes (x1, x2, x3, x4, y1, y2)."""

    __slots__ = ("n", "values")

    def __init__(self, values):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 6 or len(set(values.shape)) != 1:
            raise UnsupportedGridError("expected an n^6 lattice, got {}".format(values.shape))
        check_grid6(values.shape[0])
        self.n = values.shape[0]
        self.values = values

    def transform(self):
        return transform6(self.values)

    def __repr__(self):
        return "GridField6D(n={})".format(self.n)


def transform6(values):
    """Real-to-complex transform over all six axes, (2 pi)^-6 normalized."""
    return fft.rfftn(values) / values.size


def inverse6(coeffs, n):
    return fft.irfftn(coeffs * n ** 6, s=(n,) * 6)


def separable_transform(values, order):
    """Full complex transform applied one axis at a time in the given order."""
    out = np.asarray(values, dtype=np.complex128)
    for axis in order:
        out = fft.fft(out, axis=axis)
    return out / out.size


def wavenumbers6(n):
    """Broadcastable integer wave numbers of the 6D half spectrum (last axis halved)."""
    ks = []
    for axis in range(6):
        shape = [1] * 6
        if axis == 5:
            k = fft.rfftfreq(n, 1.0 / n)
        else:
            k = fft.fftfreq(n, 1.0 / n)
        shape[axis] = k.size
        ks.append(k.reshape(shape))
    return ks


def dealias_mask6(n):
    mask = True
    for k in wavenumbers6(n):
        mask = mask & (np.abs(k) < n / 3.0)
    return mask


def norm6(values):
    """L2 norm on the 6D torus by grid quadrature."""
    return np.sqrt(TWO_PI ** 6 * np.mean(np.square(values)))


def inner6(a, b):
    return TWO_PI ** 6 * np.mean(a * b)
