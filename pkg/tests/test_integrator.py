import numpy as np
import pytest
from scipy import fft
from scipy.stats import linregress

from cellmix.errors import CFLWarning, UnsupportedGridError
from cellmix.spectral.fields import wavenumbers6
from cellmix.twopoint.functionals import preset
from cellmix.twopoint.integrator import (
    RECORD_COLUMNS,
    TwoPointIntegrator,
    two_point_solve,
    two_point_step,
)
from cellmix.twopoint.state import TwoPointState, random_two_point


def test_integrator_setup():
    integrator = TwoPointIntegrator(8)
    assert integrator.max_speed == pytest.approx(np.sqrt(2))
    assert integrator.cfl_limit() == pytest.approx(0.5 * (2 * np.pi / 8) / np.sqrt(2))
    with pytest.raises(UnsupportedGridError):
        TwoPointIntegrator(10)


def test_heat_semigroup_in_y(small_two_point_samples):
    state = small_two_point_samples[0]
    ks = wavenumbers6(8)
    ksq_y = ks[4] ** 2 + ks[5] ** 2
    out = two_point_step(state, 0.05, advection=False)
    expected = fft.rfftn(state.values) * np.exp(-state.nu * ksq_y * 0.05)
    assert np.abs(fft.rfftn(out.values) - expected).max() < 1e-12 * np.abs(expected).max()


def test_step_validation(small_two_point_samples):
    state = small_two_point_samples[0]
    with pytest.raises(ValueError):
        two_point_step(state, 0.0)
    with pytest.warns(CFLWarning):
        two_point_step(state, 0.5)


def test_advection_conserves_l2(small_two_point_samples):
    state = small_two_point_samples[1]
    state = TwoPointState(state.f, 0.0, 0.0)
    integrator = TwoPointIntegrator(8)
    out = state
    for _ in range(10):
        out = integrator.step(out, 0.02)
    before = np.sqrt((state.values ** 2).mean())
    after = np.sqrt((out.values ** 2).mean())
    # skew on the dealiased subspace
    assert abs(after / before - 1) < 1e-6


def test_solve_records(small_two_point_samples):
    seen = []
    series = two_point_solve(
        small_two_point_samples[2],
        preset("moderate"),
        dt=0.05,
        t_final=0.5,
        record_every=5,
        on_record=lambda state: seen.append(state.time),
    )
    assert list(series.columns) == RECORD_COLUMNS
    assert np.allclose(series["t"], [0.0, 0.25, 0.5])
    assert np.allclose(seen, series["t"])
    assert series["gronwall_residual"].iloc[:-1].notna().all()
    assert np.isnan(series["gronwall_residual"].iloc[-1])
    assert (series["phi"] > 0).all()
    assert np.all(np.diff(series["l2"]) < 0)


def test_x_mean_stays_zero():
    state = random_two_point(8, seed=1, kappa=0.1)
    series = two_point_solve(state, preset("moderate"), dt=0.05, t_final=5.0, record_every=20)
    assert series["xmean"].max() <= 1e-10


def test_l2_decay_rate():
    state = random_two_point(8, seed=4, nu=4.0)
    series = two_point_solve(state, preset("moderate"), dt=0.05, t_final=5.0, record_every=10)
    late = series[series["t"] >= 1.0]
    fit = linregress(late["t"], np.log(late["l2"]))
    assert -fit.slope > 0


@pytest.mark.slow
def test_l2_decay_rate_n12():
    state = random_two_point(12, seed=0, nu=4.0)
    series = two_point_solve(state, preset("moderate"), dt=0.02, t_final=5.0, record_every=25)
    late = series[series["t"] >= 1.0]
    fit = linregress(late["t"], np.log(late["l2"]))
    assert -fit.slope > 0
    assert series["xmean"].max() <= 1e-10

    window = series[(series["t"] >= 1.0 - 1e-9) & (series["t"] <= 5.0 + 1e-9)]
    assert len(window) == 9
    for column in ("l2", "h1w", "phi"):
        assert (np.diff(window[column].to_numpy()) < 0).all(), column
