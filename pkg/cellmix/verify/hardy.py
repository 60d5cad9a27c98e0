"""Hardy-Poincare constants.

1D: the best C in

    integral_0^pi (H - mean H)^2 dx <= C integral_0^pi sin^2(x) H'(x)^2 dx

for pi-periodic H.  Under s = log tan(x / 2) both sides become integrals
with the weight sech(s) ds, so the problem is a Sturm-Liouville problem on
the line; it is discretized with finite differences on a uniform s-grid and
C is the inverse of the smallest nonzero generalized eigenvalue.

2D: the Galerkin bottom of the spectrum of -Laplacian + w^2 for a weight
vanishing at finitely many points, checked against Rayleigh quotients.
"""

from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd
from scipy import fft, linalg, sparse
from scipy.sparse.linalg import eigsh

from cellmix.flow.shifts import split_seed
from cellmix.spectral.fields import (
    TWO_PI,
    SpectralField2D,
    gradient_grid,
    grid_points,
    inverse,
    random_bandlimited,
    transform,
    wavenumbers,
)
from cellmix.twopoint.operators import derivative
from cellmix.twopoint.state import pi_shift_average


log = logging.getLogger(__name__)

# smallest admissible deflated eigenvalue before the grid is refined
SINGULAR_TOL = 1e-10

# maximum eigen-residual accepted
RESIDUAL_TOL = 1e-10

# regression guard for the telescoping Poincare constant
TELESCOPING_GUARD = 2.5


@dataclass
class HardyResult1D:
    """Weighted and unweighted 1D constants.

    Attributes
    ----------
    constant : float
        weighted sin^2 constant
    unweighted_2pi : float
        Poincare constant of 2 pi-periodic functions
    unweighted_pi : float
        Poincare constant of pi-periodic functions (weight 1)
    eigenvalue : float
        smallest nonzero generalized eigenvalue, 1 / constant
    residual : float
    n : int
        grid points actually used
    refined : int
        number of refinements after a singular solve
    flagged : bool
        True if the discretization stayed singular
    """

    constant: float
    unweighted_2pi: float
    unweighted_pi: float
    eigenvalue: float
    residual: float
    n: int
    refined: int = 0
    flagged: bool = False


def _deflated_min(matrix, null_vector):
    """Smallest eigenvalue of a symmetric matrix on the complement of null_vector."""
    q = null_vector / np.linalg.norm(null_vector)
    basis = linalg.null_space(q[None, :])
    reduced = basis.T @ matrix @ basis
    values, vectors = linalg.eigh(reduced)
    residual = np.linalg.norm(reduced @ vectors[:, 0] - values[0] * vectors[:, 0])
    return values[0], residual


def unweighted_poincare(n, period=TWO_PI):
    """Poincare constant of the spectral -d^2/dx^2 on an n-point periodic grid."""
    k = fft.fftfreq(n, 1.0 / n) * (TWO_PI / period)
    symbol = k ** 2
    # circulant matrix of the symbol
    column = fft.ifft(symbol).real
    matrix = linalg.circulant(column)
    matrix = 0.5 * (matrix + matrix.T)
    value, _ = _deflated_min(matrix, np.ones(n))
    return 1.0 / value


def sech_grid(n):
    """Uniform s-grid with spacing 8 / sqrt(n), centered at 0."""
    h = 8.0 / np.sqrt(n)
    s = (np.arange(n) - (n - 1) / 2.0) * h
    return s, h


def weighted_eigenvalue(n):
    """Smallest nonzero eigenvalue of the sech-weighted problem on n points.

    Stiffness uses midpoint weights sech(s_{i+1/2}) (dH)^2 / h, the mass is
    diagonal sech(s_i) h.  The pencil is symmetrized as
    D^{-1/2} K D^{-1/2}, whose null vector is sqrt(diag D).
    """

    s, h = sech_grid(n)
    mass = h / np.cosh(s)
    edges = 1.0 / np.cosh(0.5 * (s[:-1] + s[1:])) / h

    stiffness = np.zeros((n, n))
    idx = np.arange(n - 1)
    stiffness[idx, idx] += edges
    stiffness[idx + 1, idx + 1] += edges
    stiffness[idx, idx + 1] -= edges
    stiffness[idx + 1, idx] -= edges

    scale = 1.0 / np.sqrt(mass)
    symmetric = scale[:, None] * stiffness * scale[None, :]
    return _deflated_min(symmetric, np.sqrt(mass))


def hardy_poincare_1d(n=256, retries=2):
    """Best constant of the sin^2-weighted Poincare inequality.

    Parameters
    ----------
    n : int, optional (default: 256)
        grid points, >= 64
    retries : int, optional (default: 2)
        grid doublings allowed when the deflated problem is singular

    Returns
    -------
    HardyResult1D
    """

    if n < 64:
        raise ValueError("need at least 64 grid points, got {}".format(n))

    refined = 0
    value, residual = weighted_eigenvalue(n)
    while value <= SINGULAR_TOL and refined < retries:
        log.warning("Singular weighted problem on {:,} points; refining".format(n))
        n *= 2
        refined += 1
        value, residual = weighted_eigenvalue(n)

    flagged = value <= SINGULAR_TOL or residual > RESIDUAL_TOL * max(1.0, abs(value))
    constant = 1.0 / value if value > SINGULAR_TOL else np.inf
    return HardyResult1D(
        constant=constant,
        unweighted_2pi=unweighted_poincare(n, TWO_PI),
        unweighted_pi=unweighted_poincare(n, np.pi),
        eigenvalue=value,
        residual=residual,
        n=n,
        refined=refined,
        flagged=bool(flagged),
    )


def weighted_quotient_1d(func, dfunc, m=4096):
    """integral (H - mean)^2 / integral sin^2 H'^2 over (0, pi) by midpoint rule."""
    x = (np.arange(m) + 0.5) * np.pi / m
    values = func(x)
    centered = values - values.mean()
    return np.sum(centered ** 2) / np.sum(np.sin(x) ** 2 * dfunc(x) ** 2)


### 2D


def omega_squared(a, b):
    """Default weight cos^2 a cos^2 2b + sin^2 a sin^2 2b / 4."""
    return np.cos(a) ** 2 * np.cos(2 * b) ** 2 + np.sin(a) ** 2 * np.sin(2 * b) ** 2 / 4


def galerkin_floor(weight, n, kmax=None):
    """Smallest eigenvalue of -Laplacian + weight on Fourier modes |p|, |q| <= kmax.

    The weight's coefficients come from an n x n sampling; the matrix is
    diag(p^2 + q^2) plus the convolution with the weight's spectrum.
    """

    kmax = n // 4 if kmax is None else kmax
    x1, x2 = grid_points(n)
    spectrum = fft.fft2(np.broadcast_to(weight(x1, x2), (n, n))) / (n * n)
    freqs = fft.fftfreq(n, 1.0 / n).astype(int)
    rows, cols = np.nonzero(np.abs(spectrum) > 1e-14)
    offsets = [(freqs[r], freqs[c], spectrum[r, c].real) for r, c in zip(rows, cols)]

    side = 2 * kmax + 1
    p, q = np.meshgrid(np.arange(-kmax, kmax + 1), np.arange(-kmax, kmax + 1), indexing="ij")
    p, q = p.ravel(), q.ravel()
    index = (p + kmax) * side + (q + kmax)

    data = [(p ** 2 + q ** 2).astype(float)]
    row_idx = [index]
    col_idx = [index]
    for dp, dq, value in offsets:
        # entry (p, q) <- (p - dp, q - dq)
        pp, qq = p - dp, q - dq
        keep = (np.abs(pp) <= kmax) & (np.abs(qq) <= kmax)
        data.append(np.full(keep.sum(), value))
        row_idx.append(index[keep])
        col_idx.append((pp[keep] + kmax) * side + (qq[keep] + kmax))

    matrix = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(row_idx), np.concatenate(col_idx))),
        shape=(side * side, side * side),
    ).tocsc()
    matrix = 0.5 * (matrix + matrix.T)
    value = eigsh(matrix, k=1, sigma=0, which="LM", return_eigenvectors=False)[0]
    return float(value)


def rayleigh_quotient(field, weight):
    """(integral w g^2 + integral |grad g|^2) / integral g^2 by grid quadrature."""
    n = field.n
    x1, x2 = grid_points(n)
    values = inverse(field)
    d1, d2 = gradient_grid(field)
    w = np.broadcast_to(weight(x1, x2), (n, n))
    numerator = np.mean(w * values ** 2) + np.mean(d1 ** 2 + d2 ** 2)
    return float(numerator / np.mean(values ** 2))


def degeneracy_bump(n, kmax, center=(np.pi / 2, 0.0), sharpness=6.0):
    """Smooth bump at a zero of the weight, truncated to |k_i| <= kmax."""
    x1, x2 = grid_points(n)
    values = np.exp(sharpness * (np.cos(x1 - center[0]) + np.cos(x2 - center[1])))
    field = transform(np.broadcast_to(values, (n, n)))
    k1, k2 = wavenumbers(n)
    band = (np.abs(k1) <= kmax) & (k2 <= kmax)
    return SpectralField2D(field.coeffs * band)


def hardy_poincare_2d(n=128, samples=100, kmax=8, seed=0, weight=omega_squared):
    """Rayleigh quotients of random band-limited g against the Galerkin floor.

    Returns
    -------
    dict
        floor, min_quotient, constant_quotient, bump_quotient and the
        per-sample quotients as a pandas Series
    """

    floor = galerkin_floor(weight, n)
    quotients = []
    for i in range(samples):
        g = random_bandlimited(n, kmax, split_seed(seed, i, "samples"))
        quotients.append(rayleigh_quotient(g, weight))
    quotients = pd.Series(quotients, name="quotient")

    x1, x2 = grid_points(n)
    constant = float(np.mean(np.broadcast_to(weight(x1, x2), (n, n))))
    bump = rayleigh_quotient(degeneracy_bump(n, kmax), weight)

    log.info(
        "Hardy 2D on n={}: floor {:.6f}, min sample quotient {:.6f}".format(
            n, floor, quotients.min()
        )
    )
    return {
        "floor": floor,
        "min_quotient": float(min(quotients.min(), bump)),
        "constant_quotient": constant,
        "bump_quotient": bump,
        "quotients": quotients,
    }


### telescoping Poincare on T^4


def random_symmetric_field4(n, seed=0, index=0, kmax=2):
    """Random band-limited mean-zero field on T^4, pi-shift symmetric in both pairs."""
    rng = np.random.Generator(np.random.Philox(split_seed(seed, index, "samples")))
    coeffs = fft.fftn(rng.standard_normal((n,) * 4))
    k = fft.fftfreq(n, 1.0 / n)
    band = np.ones(coeffs.shape, dtype=bool)
    for axis in range(4):
        shape = [1] * 4
        shape[axis] = n
        band &= (np.abs(k) <= kmax).reshape(shape)
    coeffs[~band] = 0
    coeffs[(0,) * 4] = 0
    values = fft.ifftn(coeffs).real
    for pair in (0, 1):
        values = pi_shift_average(values, pair)
    return values


def telescoping_ratio(values):
    """||f|| / (||d1 f|| + ||d2 f|| + ||s3 d3 f|| + ||s4 d4 f||) on T^4."""
    n = values.shape[0]
    x = TWO_PI * np.arange(n) / n
    s3 = np.sin(x).reshape(1, 1, n, 1)
    s4 = np.sin(x).reshape(1, 1, 1, n)

    def norm(v):
        return np.sqrt(TWO_PI ** 4 * np.mean(np.square(v)))

    denominator = (
        norm(derivative(values, 0))
        + norm(derivative(values, 1))
        + norm(s3 * derivative(values, 2))
        + norm(s4 * derivative(values, 3))
    )
    return float(norm(values) / denominator)


def telescoping_poincare(samples=20, n=16, seed=0, kmax=2):
    """Ratios of the telescoping Poincare inequality over random symmetric fields."""
    ratios = [
        telescoping_ratio(random_symmetric_field4(n, seed, i, kmax)) for i in range(samples)
    ]
    return pd.Series(ratios, name="ratio")
