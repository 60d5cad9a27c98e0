from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from cellmix.errors import InfeasibleSystemError
from cellmix.twopoint.functionals import CoefficientSet
from cellmix.verify.exponents import (
    CONSTRAINTS,
    VARIABLES,
    ExponentAssignment,
    brute_force_minimum,
    check_exponent_system,
    lp_relaxation,
    minimize_exponents,
    round_and_repair,
    solve_lp,
)


def test_published_assignment_passes(published_assignment):
    check = check_exponent_system(published_assignment)
    assert check.passed
    assert check.violations == []
    assert "2z2 >= 1 + x2 + y2" in check.tight
    assert len(check.tight) == 3
    assert len(check.margins) == 20
    assert (check.margins["slack"] >= 0).all()


def test_mutated_assignment_fails(published_assignment):
    values = published_assignment.as_dict()
    values["x1"] = 384
    check = check_exponent_system(values)
    assert not check.passed
    assert check.violations[0] == "x1 >= 1 + y0"
    row = check.margins.set_index("constraint").loc["x1 >= 1 + y0"]
    assert row["lhs"] == 384 and row["rhs"] == 385


def test_zero_assignment_fails():
    check = check_exponent_system({name: 0 for name in VARIABLES})
    assert check.violations[0] == "x0 >= 1"


def test_checks_are_exact():
    values = {name: Fraction(1, 3) for name in VARIABLES}
    check = check_exponent_system(values)
    assert isinstance(check.margins["slack"].iloc[0], Fraction)


def test_assignment_helpers(published_assignment):
    assert published_assignment.is_integral()
    assert published_assignment.max_exponent == 493
    assert published_assignment.total == sum([256, 448, 488, 492, 384, 480, 493, 472, 491])
    x, y, z = published_assignment.groups()
    coeffs = CoefficientSet(0.1, 4.0, x, y, z)
    assert coeffs.pair("alpha", 3)[0] == pytest.approx(492 * np.log(0.1))


def test_solve_lp():
    # min x + y with x + 2y = 4, x - y = 1
    solution = solve_lp([[1, 2], [1, -1]], [4, 1], [1, 1])
    assert solution == [Fraction(2), Fraction(1)]
    with pytest.raises(InfeasibleSystemError):
        solve_lp([[1]], [-1], [1])


def test_lp_relaxation_matches_linprog():
    values, bound = lp_relaxation("sum")
    matrix = np.array([[-coeffs.get(name, 0) for name in VARIABLES] for _, coeffs in CONSTRAINTS])
    result = linprog(np.ones(len(VARIABLES)), A_ub=matrix, b_ub=-np.ones(len(CONSTRAINTS)), bounds=(0, None))
    assert result.success
    assert float(bound) == pytest.approx(result.fun, rel=1e-9)
    assert check_exponent_system(values).passed
    with pytest.raises(ValueError):
        lp_relaxation("min")


@pytest.mark.parametrize("objective", ["max", "sum"])
def test_minimize_exponents(objective, published_assignment):
    assignment = minimize_exponents(objective)
    assert isinstance(assignment, ExponentAssignment)
    assert assignment.is_integral()
    assert check_exponent_system(assignment).passed
    if objective == "max":
        assert assignment.max_exponent <= published_assignment.max_exponent
    else:
        assert assignment.total <= published_assignment.total


def test_minimize_with_fixed_variables(published_assignment):
    assignment = minimize_exponents("sum", fixed=restricted(published_assignment))
    assert (assignment.x0, assignment.y0, assignment.x1) == (122, 243, 362)
    assert assignment.z1 == 472
    assert check_exponent_system(assignment).passed


def test_max_exponent_lp_bound():
    # every gap of the chain is forced from the top down; the bound is attained
    _, bound = lp_relaxation("max")
    assert bound == 53
    point = {"x0": 12, "y0": 23, "x1": 33, "z1": 41, "y1": 42, "x2": 48, "z2": 51, "x3": 52, "y2": 53}
    assert check_exponent_system(point).passed


def test_round_and_repair():
    values, _ = lp_relaxation("max")
    repaired = round_and_repair(values)
    assert all(v.denominator == 1 for v in repaired.values())
    assert check_exponent_system(repaired).passed


def restricted(published_assignment):
    return {k: v for k, v in published_assignment.as_dict().items() if k not in ("x0", "y0", "x1")}


def test_restricted_lp_bound(published_assignment):
    values, bound = lp_relaxation("sum", restricted(published_assignment))
    assert bound == 725
    assert values["z1"] == 472


def test_brute_force_confirms_lp_bound(published_assignment):
    # no integer point lies at or below the rational bound
    assert brute_force_minimum(restricted(published_assignment)) is None
    with pytest.raises(ValueError):
        brute_force_minimum(restricted(published_assignment), free=("x0", "y0"))


@pytest.mark.slow
def test_brute_force_minimum(published_assignment):
    assert brute_force_minimum(restricted(published_assignment), limit=727) == 727
