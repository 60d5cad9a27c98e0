import numpy as np
import pytest
from scipy import fft

from cellmix.errors import NonZeroMeanError, UnsupportedGridError
from cellmix.spectral.fields import (
    TWO_PI,
    GridField6D,
    SpectralField2D,
    check_grid,
    check_grid6,
    dealias,
    evaluate,
    grid_points,
    inner,
    inverse,
    inverse6,
    l2_norm,
    laplacian,
    lattice_samples,
    norm6,
    project_mean_zero,
    random_bandlimited,
    resample,
    separable_transform,
    sobolev_norm,
    spectral_derivative,
    transform,
    transform6,
    wavenumbers,
)


def sine(n=32):
    return SpectralField2D.from_function(lambda x1, x2: np.sin(x1) + 0 * x2, n)


def test_constant_transform():
    field = transform(np.ones((16, 16)))
    assert field.coeffs[0, 0] == pytest.approx(1.0)
    assert np.abs(field.coeffs).sum() == pytest.approx(1.0)


def test_sine_coefficients():
    field = sine(16)
    # k = (1, 0) lives in row 1, column 0; k = (-1, 0) in row n - 1
    assert field.coeffs[1, 0] == pytest.approx(-0.5j)
    assert field.coeffs[15, 0] == pytest.approx(0.5j)


def test_round_trip(random_fields):
    for field in random_fields:
        values = inverse(field)
        assert np.abs(transform(values).coeffs - field.coeffs).max() < 1e-13


def test_parseval(random_fields):
    for field in random_fields:
        quadrature = np.sqrt(TWO_PI ** 2 * np.mean(inverse(field) ** 2))
        assert l2_norm(field) == pytest.approx(quadrature, rel=1e-12)


def test_unsupported_grids():
    for n in (2, 6, 12, 100):
        with pytest.raises(UnsupportedGridError):
            check_grid(n)
    for n in (4, 10, 32):
        with pytest.raises(UnsupportedGridError):
            check_grid6(n)
    with pytest.raises(UnsupportedGridError):
        transform(np.zeros((12, 12)))


def test_sobolev_norm_of_sine():
    field = sine()
    assert sobolev_norm(field, 0) == pytest.approx(np.pi * np.sqrt(2), rel=1e-13)
    assert sobolev_norm(field, -1) == pytest.approx(np.pi * np.sqrt(2), rel=1e-13)
    assert sobolev_norm(field, 2) == pytest.approx(np.pi * np.sqrt(2), rel=1e-13)
    assert sobolev_norm(SpectralField2D.zeros(16), -1) == 0


def test_sobolev_norm_scales_with_wavenumber():
    field = SpectralField2D.from_function(lambda x1, x2: np.sin(2 * x1) + 0 * x2, 32)
    assert sobolev_norm(field, -1) == pytest.approx(np.pi * np.sqrt(2) / 2, rel=1e-13)
    assert sobolev_norm(field, 1) == pytest.approx(np.pi * np.sqrt(2) * 2, rel=1e-13)


def test_sobolev_norm_needs_mean_zero():
    field = SpectralField2D.from_function(lambda x1, x2: 1 + np.sin(x1) + 0 * x2, 16)
    with pytest.raises(NonZeroMeanError):
        sobolev_norm(field, -1)
    # positive orders ignore the mean
    assert sobolev_norm(field, 1) > 0
    with pytest.raises(ValueError):
        sobolev_norm(sine(), 5)


def test_sobolev_properties(random_fields):
    for field in random_fields:
        assert sobolev_norm(field.scaled(-3.0), -1) == pytest.approx(
            3 * sobolev_norm(field, -1), rel=1e-14
        )
        assert sobolev_norm(field, -2) <= sobolev_norm(field, -1) <= sobolev_norm(field, 0)
        # interpolation inequality
        assert l2_norm(field) ** 2 <= sobolev_norm(field, -1) * sobolev_norm(field, 1) * (1 + 1e-12)


def test_derivatives(random_fields):
    field = sine()
    cosine = np.broadcast_to(np.cos(grid_points(32)[0]), (32, 32))
    assert np.abs(inverse(spectral_derivative(field, 0)) - cosine).max() < 1e-13

    product = SpectralField2D.from_function(lambda x1, x2: np.sin(x1) * np.sin(x2), 16)
    assert np.abs(laplacian(product).coeffs + 2 * product.coeffs).max() < 1e-15

    f = random_fields[0]
    d12 = spectral_derivative(spectral_derivative(f, 0), 1)
    d21 = spectral_derivative(spectral_derivative(f, 1), 0)
    assert np.abs(d12.coeffs - d21.coeffs).max() < 1e-15


def test_derivative_is_skew(random_fields):
    f, g = random_fields[:2]
    assert inner(spectral_derivative(f, 0), g) == pytest.approx(
        -inner(f, spectral_derivative(g, 0)), abs=1e-12
    )


def test_project_mean_zero(random_fields):
    field = SpectralField2D.from_function(lambda x1, x2: 1 + np.sin(x1) + 0 * x2, 16)
    projected = project_mean_zero(field)
    assert np.abs(projected.coeffs - sine(16).coeffs).max() < 1e-15
    again = project_mean_zero(projected)
    assert np.array_equal(again.coeffs, projected.coeffs)
    offset = SpectralField2D.from_function(lambda x1, x2: 3 + 0 * x1 * x2, 32)
    assert abs(inverse(project_mean_zero(random_fields[1] + offset)).mean()) < 1e-14


def test_random_bandlimited():
    field = random_bandlimited(32, 3, seed=11)
    assert l2_norm(field) == pytest.approx(1.0)
    assert field.mean == 0
    k1, k2 = wavenumbers(32)
    outside = (np.abs(k1) > 3) | (k2 > 3)
    assert np.abs(field.coeffs[np.broadcast_to(outside, field.coeffs.shape)]).max() == 0
    assert np.array_equal(random_bandlimited(32, 3, seed=11).coeffs, field.coeffs)
    with pytest.raises(ValueError):
        random_bandlimited(8, 4, seed=0)


def test_resample_preserves_band_limited_fields(random_fields):
    field = random_fields[2]
    up = resample(field, 64)
    assert l2_norm(up) == pytest.approx(l2_norm(field), rel=1e-13)
    down = resample(up, 32)
    assert np.abs(down.coeffs - field.coeffs).max() < 1e-15


def test_lattice_samples(random_fields):
    field = random_fields[0]
    x = TWO_PI * np.arange(12) / 12
    # bandwidth 4 is resolved on the 12-lattice
    assert np.abs(lattice_samples(field, 12) - evaluate(field, x[:, None], x[None, :])).max() < 1e-12
    assert np.abs(lattice_samples(field, 32) - field.to_grid()).max() < 1e-14

    high = SpectralField2D.from_function(lambda x1, x2: np.sin(7 * x1) + 0 * x2, 32)
    assert np.abs(lattice_samples(high, 12)).max() < 1e-15
    with pytest.raises(UnsupportedGridError):
        lattice_samples(field, 9)


def test_evaluate_matches_grid(random_fields):
    field = random_fields[3]
    x1, x2 = np.broadcast_arrays(*grid_points(32))
    assert np.abs(evaluate(field, x1, x2) - inverse(field)).max() < 1e-12
    assert evaluate(SpectralField2D.zeros(8), [0.3], [1.2])[0] == 0


def test_6d_lattice():
    assert norm6(np.ones((8,) * 6)) == pytest.approx(TWO_PI ** 3)
    with pytest.raises(UnsupportedGridError):
        GridField6D(np.zeros((6,) * 6))

    values = np.random.default_rng(2).standard_normal((8,) * 6)
    assert np.abs(inverse6(transform6(values), 8) - values).max() < 1e-12


def test_separable_transform_is_order_independent():
    rng = np.random.default_rng(5)
    values = rng.standard_normal((8,) * 6)
    first = separable_transform(values, range(6))
    second = separable_transform(values, [5, 3, 1, 0, 2, 4])
    assert np.abs(first - second).max() < 1e-12
    assert np.abs(first - fft.fftn(values) / values.size).max() < 1e-12


def test_dealias():
    # 2/3 rule on n = 16 keeps |k| <= 5
    kept = SpectralField2D.from_function(lambda x1, x2: np.sin(5 * x1) + 0 * x2, 16)
    dropped = SpectralField2D.from_function(lambda x1, x2: np.cos(6 * x2) + 0 * x1, 16)
    assert np.allclose(dealias(kept).coeffs, kept.coeffs)
    assert np.abs(dealias(dropped).coeffs).max() == 0
