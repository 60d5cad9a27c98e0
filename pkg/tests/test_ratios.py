import logging

import numpy as np
import pytest

from cellmix.errors import NonZeroMeanError
from cellmix.spectral.fields import GridField6D
from cellmix.twopoint.functionals import preset
from cellmix.twopoint.operators import axis_grid
from cellmix.twopoint.state import TwoPointState
from cellmix.verify.ratios import (
    phi_h1_ratio_bracket,
    phi_h1_ratios,
    phi_psi_ratio,
    psi_controls_phi_ratio,
    random_samples,
)


def sine_y_state(nu=4.0):
    values = np.broadcast_to(np.sin(axis_grid(8, 4)), (8,) * 6).copy()
    return TwoPointState(GridField6D(values), 0.0, nu)


def scaled(state, factor):
    return TwoPointState(GridField6D(factor * state.values), state.kappa_tilde, state.nu)


def test_random_samples():
    samples = random_samples(3, seed=5)
    assert len(samples) == 3
    assert all(state.n == 8 for state in samples)
    assert not np.allclose(samples[0].values, samples[1].values)


def test_phi_h1_bracket(small_two_point_samples):
    low, high = phi_h1_ratio_bracket(small_two_point_samples, preset("moderate"))
    assert 0 < low <= high < np.inf


def test_phi_h1_single_sample():
    ratios = phi_h1_ratios([sine_y_state()], preset("moderate"))
    assert ratios.iloc[0] > 0


def test_ratios_are_scale_invariant(small_two_point_samples):
    coeffs = preset("moderate")
    states = small_two_point_samples[:2]
    doubled = [scaled(state, 2.0) for state in states]
    assert np.allclose(phi_h1_ratios(doubled, coeffs), phi_h1_ratios(states, coeffs), rtol=1e-12)
    for state, big in zip(states, doubled):
        assert phi_psi_ratio(big, coeffs) == pytest.approx(phi_psi_ratio(state, coeffs), rel=1e-12)


def test_phi_psi_of_zero_is_excluded():
    zero = scaled(sine_y_state(), 0.0)
    assert np.isnan(phi_psi_ratio(zero, preset("moderate")))
    report = psi_controls_phi_ratio([zero], preset("moderate"))
    assert np.isnan(report.max_ratio)
    assert report.violations == []


def test_psi_controls_phi(small_two_point_samples):
    report = psi_controls_phi_ratio(small_two_point_samples, preset("moderate"))
    assert np.isfinite(report.max_ratio)
    assert report.max_ratio > 0
    assert len(report.ratios) == len(small_two_point_samples)
    assert report.violations == []


def test_pure_y_field_closed_form():
    nu = 4.0
    state = sine_y_state(nu)
    with pytest.raises(NonZeroMeanError):
        psi_controls_phi_ratio([state], preset("moderate"))
    report = psi_controls_phi_ratio([state], preset("moderate"), require_mean_zero=False)
    assert report.max_ratio == pytest.approx(1 / (2 * nu), rel=1e-10)


def test_zero_dissipation_is_flagged(caplog):
    constant = TwoPointState(GridField6D(np.ones((8,) * 6)), 0.0, 4.0)
    with caplog.at_level(logging.WARNING):
        report = psi_controls_phi_ratio([constant], preset("moderate"), require_mean_zero=False)
    assert report.violations == [0]
    assert np.isinf(report.ratios.iloc[0])
    assert "zero dissipation" in caplog.text
