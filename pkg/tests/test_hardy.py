import numpy as np
import pytest

from cellmix.spectral.fields import SpectralField2D, random_bandlimited
from cellmix.twopoint.state import pi_shift, pi_shift_error
from cellmix.verify.hardy import (
    TELESCOPING_GUARD,
    degeneracy_bump,
    galerkin_floor,
    hardy_poincare_1d,
    hardy_poincare_2d,
    omega_squared,
    random_symmetric_field4,
    rayleigh_quotient,
    telescoping_poincare,
    unweighted_poincare,
    weighted_quotient_1d,
)


def test_unweighted_poincare():
    assert unweighted_poincare(64) == pytest.approx(1.0, abs=1e-6)
    assert unweighted_poincare(64, np.pi) == pytest.approx(0.25, abs=1e-6)


def test_hardy_1d():
    result = hardy_poincare_1d(256)
    assert not result.flagged
    assert result.refined == 0
    assert result.constant == pytest.approx(4.0, rel=0.05)
    assert result.eigenvalue == pytest.approx(1 / result.constant)
    assert result.unweighted_2pi == pytest.approx(1.0, abs=1e-6)
    # weight 1 dominates sin^2
    assert result.unweighted_pi <= result.constant


def test_hardy_1d_refinement():
    coarse = hardy_poincare_1d(128).constant
    fine = hardy_poincare_1d(256).constant
    assert abs(fine - coarse) / fine <= 0.05


def test_hardy_1d_test_function():
    constant = hardy_poincare_1d(256).constant
    quotient = weighted_quotient_1d(lambda x: np.cos(2 * x), lambda x: -2 * np.sin(2 * x))
    assert quotient == pytest.approx(0.5, rel=1e-6)
    assert quotient <= constant


def test_hardy_1d_validation():
    with pytest.raises(ValueError):
        hardy_poincare_1d(32)


def test_constant_quotient():
    constant = SpectralField2D.from_function(lambda x1, x2: 1 + 0 * x1 * x2, 32)
    assert rayleigh_quotient(constant, omega_squared) == pytest.approx(5 / 16, rel=1e-12)


def test_galerkin_floor_bounds_quotients():
    floor = galerkin_floor(omega_squared, 32)
    assert 0 < floor < 5 / 16
    for seed in range(10):
        g = random_bandlimited(32, 6, seed)
        assert rayleigh_quotient(g, omega_squared) >= floor * (1 - 1e-9)
    bump = degeneracy_bump(32, 6)
    assert rayleigh_quotient(bump, omega_squared) >= floor * (1 - 1e-9)


def test_bump_sits_on_a_zero():
    # omega vanishes at (pi / 2, 0)
    assert omega_squared(np.pi / 2, 0.0) == pytest.approx(0, abs=1e-30)
    bump = degeneracy_bump(32, 6)
    values = bump.to_grid()
    assert np.unravel_index(values.argmax(), values.shape) == (8, 0)


def test_hardy_2d_report():
    report = hardy_poincare_2d(n=32, samples=20, kmax=6)
    assert report["floor"] > 0
    assert report["min_quotient"] >= report["floor"] * (1 - 1e-9)
    assert report["constant_quotient"] == pytest.approx(5 / 16)
    assert len(report["quotients"]) == 20


def test_galerkin_floor_refinement():
    coarse = galerkin_floor(omega_squared, 32)
    fine = galerkin_floor(omega_squared, 64)
    assert fine <= coarse * (1 + 1e-9)
    assert abs(coarse - fine) / fine <= 0.10


@pytest.mark.slow
def test_galerkin_floor_refinement_full():
    coarse = galerkin_floor(omega_squared, 128)
    fine = galerkin_floor(omega_squared, 256)
    assert abs(coarse - fine) / fine <= 0.10


def test_symmetric_field4():
    values = random_symmetric_field4(8, seed=1)
    assert values.shape == (8,) * 4
    assert abs(values.mean()) < 1e-15
    assert pi_shift_error(values) < 1e-15
    assert np.abs(pi_shift(values, 1) - values).max() < 1e-15


def test_telescoping_guard():
    ratios = telescoping_poincare(samples=10)
    assert len(ratios) == 10
    assert (ratios > 0).all()
    assert ratios.max() < TELESCOPING_GUARD
