import numpy as np
import pytest
from pytest import fixture

from cellmix.errors import InvalidDensityError, NonZeroMeanError
from cellmix.scalar.initial import make_theta0
from cellmix.spectral.fields import TWO_PI, SpectralField2D, norm6
from cellmix.twopoint.integrator import two_point_step
from cellmix.twopoint.operators import axis_grid
from cellmix.twopoint.state import (
    build_initial,
    check_density,
    max_x_mean,
    pair_observable,
    pi_shift,
    pi_shift_average,
    pi_shift_error,
    random_two_point,
    tilt_product,
    uniform_density,
)


@fixture
def sine_state():
    return build_initial(make_theta0("sine", 16), n=8, kappa=0.1)


def test_build_initial_product(sine_state):
    x1, x3 = axis_grid(8, 0), axis_grid(8, 2)
    expected = np.sin(x1 - x3) * np.sin(x1 + x3) / TWO_PI ** 2
    assert np.abs(sine_state.values - expected).max() < 1e-14
    assert sine_state.kappa_tilde == pytest.approx(0.05)
    assert sine_state.time == 0


def test_build_initial_mean_and_diagonal(sine_state):
    values = sine_state.values
    assert max_x_mean(values) < 1e-12
    assert abs(values.mean()) < 1e-15
    # on the degeneracy set the datum is theta0^2 rho0
    assert values[:, :, 0, 0].min() > -1e-15


def test_build_initial_random_datum():
    theta0 = make_theta0("random_bandlimited", 32, kmax=2, seed=4)
    state = build_initial(theta0, n=8)
    assert max_x_mean(state.values) < 1e-12
    diagonal = state.values[:, :, 0, 0]
    assert diagonal.min() > -1e-15


def test_build_initial_drops_unresolved_modes():
    # sin(5 x1) aliases to -sin(3 x1) on the 8-lattice; resampling drops it
    mixed = SpectralField2D.from_function(lambda x1, x2: np.sin(x1) + np.sin(5 * x1) + 0 * x2, 32)
    plain = make_theta0("sine", 32)
    assert np.abs(build_initial(mixed, n=8).values - build_initial(plain, n=8).values).max() < 1e-14
    assert max_x_mean(build_initial(mixed, n=12).values) < 1e-12


def test_build_initial_validation():
    with pytest.raises(NonZeroMeanError):
        build_initial(SpectralField2D.from_function(lambda x1, x2: 1 + np.sin(x1) + 0 * x2, 16))

    theta0 = make_theta0("sine", 16)
    heavy = SpectralField2D.from_function(lambda x1, x2: 2 / TWO_PI ** 2 + 0 * x1 * x2, 16)
    with pytest.raises(InvalidDensityError):
        build_initial(theta0, heavy, n=8)

    signed = SpectralField2D.from_function(lambda x1, x2: (1 + 2 * np.sin(x1) + 0 * x2) / TWO_PI ** 2, 16)
    with pytest.raises(InvalidDensityError):
        check_density(signed)


def test_nonuniform_density():
    theta0 = make_theta0("sine", 16)
    rho0 = SpectralField2D.from_function(lambda x1, x2: (1 + 0.5 * np.cos(x2) + 0 * x1) / TWO_PI ** 2, 16)
    state = build_initial(theta0, rho0, n=8)
    # y~ = (-y2, -y1): the density varies along the first y~ axis
    column = state.values[1, 0, 0, 0, :, 0]
    assert not np.allclose(column, column[0])
    assert np.allclose(state.values[1, 0, 0, 0, 0, :], state.values[1, 0, 0, 0, 0, 0])


def test_uniform_density():
    assert TWO_PI ** 2 * uniform_density(8).mean() == pytest.approx(1.0)


def test_tilt_product_without_density():
    first = np.arange(16.0).reshape(4, 4)
    values = tilt_product(first, np.ones((4, 4)), None, 4)
    assert values.shape == (4,) * 6
    # x = (i1 - i3, i2 - i4)
    assert values[3, 1, 1, 2, 0, 0] == first[2, 3]


def test_tilted_pure_diffusion(sine_state):
    # theta(t) = exp(-kappa t) sin x1, so f(t) = exp(-2 kappa t) f(0)
    state = sine_state
    for _ in range(10):
        state = two_point_step(state, 0.1, advection=False)
    assert state.time == pytest.approx(1.0)
    assert np.abs(state.values - np.exp(-0.2) * sine_state.values).max() < 1e-14


def test_pi_shift_symmetry(sine_state):
    assert pi_shift_error(sine_state.values) < 1e-15

    state = sine_state
    for _ in range(5):
        state = two_point_step(state, 0.01)
    assert pi_shift_error(state.values) < 1e-12


def test_pi_shift_average(two_point_sample):
    values = two_point_sample.values
    assert pi_shift_error(values) > 1e-4
    averaged = pi_shift_average(values, 0)
    assert np.abs(pi_shift(averaged, 0) - averaged).max() < 1e-15


def test_pair_observable():
    h = make_theta0("sine", 16)
    state = build_initial(h, n=8)
    assert pair_observable(state, h) == pytest.approx(4 * np.pi ** 4, rel=1e-12)


def test_random_two_point():
    state = random_two_point(8, seed=2, nu=2.0, kappa=0.4)
    assert norm6(state.values) == pytest.approx(1.0)
    assert max_x_mean(state.values) < 1e-12
    assert state.kappa_tilde == pytest.approx(0.2)
    assert state.nu == 2.0
    assert np.array_equal(random_two_point(8, seed=2).values, state.values)
    assert not np.allclose(random_two_point(8, seed=2, index=1).values, state.values)
