from fractions import Fraction
import math

import numpy as np
import pytest

from cellmix.scalar.initial import make_theta0
from cellmix.spectral.fields import TWO_PI, GridField6D, norm6
from cellmix.twopoint.functionals import (
    PUBLISHED_EXPONENTS,
    CoefficientSet,
    dissipation_psi,
    lyapunov_phi,
    original_product,
    original_weighted_h1_norm,
    phi_psi,
    phi_terms,
    preset,
    psi_terms,
    untilt_index,
    weighted_h1_norm,
)
from cellmix.twopoint.operators import DerivativeCache, axis_grid, trig_tables
from cellmix.twopoint.state import TwoPointState, build_initial


def field_state(array, n=8, kappa_tilde=0.0, nu=4.0):
    return TwoPointState(GridField6D(np.broadcast_to(array, (n,) * 6).copy()), kappa_tilde, nu)


def test_presets():
    published = preset("published")
    assert published.epsilon == 0.1
    assert published.x == PUBLISHED_EXPONENTS["x"]
    assert published.log("alpha", 0) == pytest.approx(256 * math.log(0.1))
    # far below double precision, kept in log space
    assert published.value("beta", 2) == 0
    assert math.isfinite(published.log("beta", 2))

    moderate = preset("moderate")
    assert moderate.epsilon == 0.5 and moderate.nu == 4.0
    assert moderate.x[0] == Fraction(4)
    assert moderate.value("delta") == pytest.approx(0.5)
    assert moderate.value("alpha", 1) == pytest.approx(0.5 ** 7 / 16)

    assert preset("moderate", epsilon=0.25, nu=8.0).nu == 8.0
    with pytest.raises(ValueError):
        preset("tight")


def test_preset_alias():
    assert preset("paper") == preset("published")
    assert preset("paper", nu=8.0) == preset("published", nu=8.0)


def test_coefficient_pairs():
    coeffs = preset("moderate")
    assert coeffs.pair("beta", 1) == (pytest.approx(7.5 * math.log(0.5)), -3)
    assert coeffs.pair("gamma", 2)[1] == -4
    with pytest.raises(KeyError):
        coeffs.pair("eta", 0)

    df = coeffs.to_frame()
    assert len(df) == 10
    assert list(df.columns) == ["coefficient", "log_mantissa", "nu_power", "log_value"]
    assert "delta" in df["coefficient"].values


def test_coefficient_validation():
    x, y, z = PUBLISHED_EXPONENTS["x"], PUBLISHED_EXPONENTS["y"], PUBLISHED_EXPONENTS["z"]
    with pytest.raises(ValueError):
        CoefficientSet(1.5, 4.0, x, y, z)
    with pytest.raises(ValueError):
        CoefficientSet(0.5, 0.0, x, y, z)
    with pytest.raises(ValueError):
        CoefficientSet(0.5, 4.0, x[:3], y, z)


def test_functionals_of_zero():
    state = field_state(np.zeros((1,) * 6))
    coeffs = preset("moderate")
    assert lyapunov_phi(state, coeffs) == 0
    assert dissipation_psi(state, coeffs) == 0
    assert weighted_h1_norm(state) == 0


def test_phi_reduces_to_l2(two_point_sample):
    # every other coefficient underflows
    coeffs = CoefficientSet(0.5, 4.0, (2000,) * 4, (2000,) * 3, (2000,) * 2)
    phi = lyapunov_phi(two_point_sample, coeffs)
    assert phi == pytest.approx(0.5 * norm6(two_point_sample.values) ** 2, rel=1e-12)


def test_constant_field_dissipates_nothing():
    state = field_state(np.ones((1,) * 6), kappa_tilde=0.1)
    assert dissipation_psi(state, preset("moderate")) == pytest.approx(0, abs=1e-20)


def test_pure_y_field():
    nu = 4.0
    state = field_state(np.sin(axis_grid(8, 4)), nu=nu)
    phi, psi = phi_psi(state, preset("moderate"))
    assert phi / psi == pytest.approx(1 / (2 * nu), rel=1e-10)

    expected = 2 * math.sqrt(TWO_PI ** 6 / 2)
    assert weighted_h1_norm(state) == pytest.approx(expected, rel=1e-12)


def test_phi_and_psi_positive(small_two_point_samples):
    coeffs = preset("moderate")
    for state in small_two_point_samples:
        phi, psi = phi_psi(state, coeffs)
        assert phi > 0
        assert psi > 0


def test_term_frames(two_point_sample):
    coeffs = preset("moderate")
    terms = phi_terms(two_point_sample, coeffs)
    assert "grad_x" not in terms.index
    assert list(terms.columns) == ["log_coefficient", "quantity", "value"]
    assert terms.loc["f", "value"] == pytest.approx(0.5)

    diffusive = TwoPointState(two_point_sample.f, 0.05, two_point_sample.nu)
    assert "grad_x" in phi_terms(diffusive, coeffs).index
    assert "k^2 Lap_x" in psi_terms(diffusive, coeffs).index
    assert dissipation_psi(diffusive, coeffs) > dissipation_psi(two_point_sample, coeffs)


def test_psi_scales_with_nu(two_point_sample):
    coeffs = preset("moderate")
    base = psi_terms(two_point_sample, coeffs)
    doubled = psi_terms(TwoPointState(two_point_sample.f, 0.0, 2 * two_point_sample.nu), coeffs)
    for term in base.index:
        factor = 2.0 if term.startswith("nu ") else 1.0
        assert doubled.loc[term, "value"] == pytest.approx(factor * base.loc[term, "value"], rel=1e-12)


def test_weighted_norm_degenerates_on_diagonal():
    # bump at x3 = x4 = 0 varying in x3; exact on the lattice
    n = 12
    x3, x4 = axis_grid(n, 2), axis_grid(n, 3)
    state = field_state((1 + np.cos(x3)) ** 4 * (1 + np.cos(x4)) ** 4, n=n)
    cache = DerivativeCache(state.values)
    weighted = norm6(trig_tables(n).weight * cache.d(2))
    plain = norm6(cache.d(2))
    assert weighted / plain == pytest.approx(math.sqrt(31 / 45), rel=1e-10)

    total = weighted_h1_norm(state)
    expected = norm6(state.values) + weighted + norm6(trig_tables(n).weight * cache.d(3))
    assert total == pytest.approx(expected, rel=1e-12)


def test_original_norm_matches_tilted():
    theta0 = make_theta0("sine", 16)
    state = build_initial(theta0, n=8, kappa=0.1)
    assert weighted_h1_norm(state) == pytest.approx(
        original_weighted_h1_norm(theta0, n=8, kappa=0.1), rel=1e-12
    )


def test_untilt_index_round_trip():
    n = 8
    theta0 = make_theta0("random_bandlimited", 32, kmax=2, seed=4)
    original = original_product(theta0, None, n)
    tilted = build_initial(theta0, n=n).values
    index = untilt_index(n)
    assert np.abs(original[index] - tilted).max() < 1e-13

    back = np.full(original.shape, np.nan)
    back[index] = tilted
    reached = ~np.isnan(back)
    assert reached.sum() == n ** 6 // 4
    assert np.abs(back[reached] - original[reached]).max() < 1e-13

    # only points with x_i + z_i even are images of the tilted lattice
    i = np.arange(n)
    even = (i[:, None] + i[None, :]) % 2 == 0
    expected = even[:, None, :, None, None, None] & even[None, :, None, :, None, None]
    assert np.array_equal(reached, np.broadcast_to(expected, reached.shape))
