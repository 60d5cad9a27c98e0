import numpy as np
import pytest

from cellmix.twopoint.operators import (
    apply_C2,
    coefficient_residual,
    commutator,
    operator_family,
)
from cellmix.verify.identities import (
    IDENTITY_TOL,
    LAPLACE_Y_EIGENVALUES,
    REMAINDER_BOUND,
    c1_s1_bracket_residual,
    defining_commutator_residual,
    divergence_residual,
    divergence_y_coefficients,
    fourth_order_ratio,
    laplace_y_residual,
    lower_bound_violations,
    pythagorean_residual,
    q2_residual,
    r2_residual,
    relative_residual,
    run_identity_suite,
    s1_derivative_residual,
    skew_residual,
    third_order_ratio,
)
from cellmix.verify.ratios import random_samples


@pytest.mark.parametrize("name", sorted(LAPLACE_Y_EIGENVALUES))
def test_laplace_y_eigenvalues(name):
    assert laplace_y_residual(name, 8) <= IDENTITY_TOL


def test_coefficient_identities():
    assert s1_derivative_residual(8) <= IDENTITY_TOL
    assert c1_s1_bracket_residual(8) <= IDENTITY_TOL
    minus_a = operator_family(8)["A"].map_coefficients(np.negative)
    assert coefficient_residual(divergence_y_coefficients(8), minus_a) <= IDENTITY_TOL


def test_relative_residual():
    a = [np.array([1.0, 2.0])]
    assert relative_residual(a, a) == 0
    assert relative_residual(a, [np.array([1.0, 1.0])]) == pytest.approx(0.5)
    assert relative_residual([np.zeros(2)], [np.zeros(2)]) == 0


def test_field_identities(small_two_point_samples):
    for state in small_two_point_samples:
        f = state.values
        assert defining_commutator_residual(f) <= IDENTITY_TOL
        assert divergence_residual(f) <= IDENTITY_TOL
        assert pythagorean_residual(f) <= IDENTITY_TOL
        assert r2_residual(f) <= IDENTITY_TOL
        assert q2_residual(f) <= IDENTITY_TOL
        assert skew_residual(f) <= IDENTITY_TOL
        assert lower_bound_violations(f) == 0


def test_remainders_are_needed(two_point_sample):
    # C2 alone does not capture [C1, A]
    ops = operator_family(two_point_sample.n)
    f = two_point_sample.values
    lhs = commutator(ops["C1"], ops["A"]).apply(f)
    assert relative_residual(lhs, apply_C2(f)) > 1e-3


def test_commutator_bounds(small_two_point_samples):
    for state in small_two_point_samples:
        third = third_order_ratio(state.values)
        fourth = fourth_order_ratio(state.values)
        assert 0 < third <= REMAINDER_BOUND
        assert 0 < fourth <= REMAINDER_BOUND


def test_identity_suite(small_two_point_samples):
    df = run_identity_suite(small_two_point_samples)
    assert list(df.columns) == ["identity", "value", "tolerance", "passed"]
    assert len(df) == 3 + 2 + 9
    assert df["passed"].all(), df[~df["passed"]]


@pytest.mark.slow
def test_identity_suite_n12():
    states = random_samples(20, n=12, seed=11)
    df = run_identity_suite(states)
    assert df["passed"].all(), df[~df["passed"]]
    for state in states:
        assert lower_bound_violations(state.values) == 0
