"""Exact checks and optimization of the coefficient exponent system.

Every constraint has the form a . v >= 1 over the nine exponents
v = (x0, x1, x2, x3, y0, y1, y2, z1, z2).  Checks are done in integer /
Fraction arithmetic; the optimizer is a two-phase tableau simplex over
Fractions (Bland's rule) followed by integer rounding and repair.
"""

from dataclasses import dataclass, fields
from fractions import Fraction
import logging
import math

import numpy as np
import pandas as pd

from cellmix.errors import InfeasibleSystemError


log = logging.getLogger(__name__)

VARIABLES = ("x0", "x1", "x2", "x3", "y0", "y1", "y2", "z1", "z2")

# label, coefficients of a . v >= 1
CONSTRAINTS = [
    # chain
    ("x0 >= 1", {"x0": 1}),
    ("y0 >= 1 + x0", {"y0": 1, "x0": -1}),
    ("x1 >= 1 + y0", {"x1": 1, "y0": -1}),
    ("z1 >= 1 + x1", {"z1": 1, "x1": -1}),
    ("y1 >= 1 + z1", {"y1": 1, "z1": -1}),
    ("x2 >= 1 + y1", {"x2": 1, "y1": -1}),
    ("z2 >= 1 + x2", {"z2": 1, "x2": -1}),
    ("x3 >= 1 + z2", {"x3": 1, "z2": -1}),
    ("y2 >= 1 + x3", {"y2": 1, "x3": -1}),
    # quadratic block
    ("2x0 >= 1 + y0", {"x0": 2, "y0": -1}),
    ("2y0 >= 1 + y1", {"y0": 2, "y1": -1}),
    ("2x1 >= 1 + y0 + y1", {"x1": 2, "y0": -1, "y1": -1}),
    ("2x2 >= 1 + y1 + y2", {"x2": 2, "y1": -1, "y2": -1}),
    ("2y0 >= 1 + x0 + x1", {"y0": 2, "x0": -1, "x1": -1}),
    ("2y1 >= 1 + x1 + x2", {"y1": 2, "x1": -1, "x2": -1}),
    ("2y2 >= 1 + x2 + x3", {"y2": 2, "x2": -1, "x3": -1}),
    ("2y1 >= 1 + y0 + y2", {"y1": 2, "y0": -1, "y2": -1}),
    ("2x1 >= 1 + y0 + z1", {"x1": 2, "y0": -1, "z1": -1}),
    ("2z1 >= 1 + x1 + x2", {"z1": 2, "x1": -1, "x2": -1}),
    ("2z2 >= 1 + x2 + y2", {"z2": 2, "x2": -1, "y2": -1}),
]

OBJECTIVES = ("max", "sum")

# iterations of the increment-repair loop before falling back to scaling
MAX_REPAIRS = 10000


@dataclass(frozen=True)
class ExponentAssignment:
    x0: Fraction
    x1: Fraction
    x2: Fraction
    x3: Fraction
    y0: Fraction
    y1: Fraction
    y2: Fraction
    z1: Fraction
    z2: Fraction

    @classmethod
    def from_dict(cls, values):
        return cls(**{name: Fraction(values[name]) for name in VARIABLES})

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def is_integral(self):
        return all(v.denominator == 1 for v in self.as_dict().values())

    @property
    def max_exponent(self):
        return max(self.as_dict().values())

    @property
    def total(self):
        return sum(self.as_dict().values())

    def groups(self):
        """(x, y, z) exponent tuples as used by CoefficientSet."""
        return (
            (self.x0, self.x1, self.x2, self.x3),
            (self.y0, self.y1, self.y2),
            (self.z1, self.z2),
        )


PUBLISHED_ASSIGNMENT = ExponentAssignment.from_dict(
    {"x0": 256, "x1": 448, "x2": 488, "x3": 492, "y0": 384, "y1": 480, "y2": 493, "z1": 472, "z2": 491}
)


@dataclass
class ExponentCheck:
    """Verdict of check_exponent_system.

    Attributes
    ----------
    passed : bool
    violations : list of str
        labels of violated constraints, in constraint order
    tight : list of str
        labels of constraints holding with equality
    margins : pandas.DataFrame
        constraint, lhs, rhs, slack for every constraint
    """

    passed: bool
    violations: list
    tight: list
    margins: pd.DataFrame


def _lhs(coeffs, values):
    return sum(Fraction(a) * values[name] for name, a in coeffs.items())


def check_exponent_system(assignment):
    """Exact verdict on all 20 inequalities.

    Parameters
    ----------
    assignment : ExponentAssignment or dict

    Returns
    -------
    ExponentCheck
    """

    if not isinstance(assignment, ExponentAssignment):
        assignment = ExponentAssignment.from_dict(assignment)
    values = assignment.as_dict()

    rows = []
    for label, coeffs in CONSTRAINTS:
        positive = {k: a for k, a in coeffs.items() if a > 0}
        negative = {k: -a for k, a in coeffs.items() if a < 0}
        lhs = _lhs(positive, values)
        rhs = 1 + _lhs(negative, values)
        rows.append({"constraint": label, "lhs": lhs, "rhs": rhs, "slack": lhs - rhs})

    margins = pd.DataFrame(rows)
    violations = [r["constraint"] for r in rows if r["slack"] < 0]
    tight = [r["constraint"] for r in rows if r["slack"] == 0]
    return ExponentCheck(not violations, violations, tight, margins)


### exact simplex


def _pivot(tableau, basis, row, col):
    pivot = tableau[row][col]
    tableau[row] = [v / pivot for v in tableau[row]]
    for i, other in enumerate(tableau):
        if i != row and other[col] != 0:
            factor = other[col]
            tableau[i] = [v - factor * p for v, p in zip(other, tableau[row])]
    basis[row] = col


def _optimize(tableau, basis, cost, columns):
    """Bland's-rule simplex on an equality tableau; last column is the RHS."""
    while True:
        entering = None
        for j in columns:
            if j in basis:
                continue
            reduced = cost[j] - sum(cost[b] * tableau[i][j] for i, b in enumerate(basis))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return

        leaving = None
        best = None
        for i, row in enumerate(tableau):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:
            raise InfeasibleSystemError("linear program is unbounded")
        _pivot(tableau, basis, leaving, entering)


def solve_lp(rows, rhs, cost):
    """min cost . v subject to rows . v = rhs, v >= 0, in exact Fractions.

    Parameters
    ----------
    rows : list of list
        equality constraint matrix
    rhs : list
    cost : list

    Returns
    -------
    list of Fraction
        an optimal vertex
    """

    m = len(rows)
    n = len(cost)
    tableau = []
    for i, (row, b) in enumerate(zip(rows, rhs)):
        row = [Fraction(a) for a in row]
        b = Fraction(b)
        if b < 0:
            row, b = [-a for a in row], -b
        artificial = [Fraction(int(i == j)) for j in range(m)]
        tableau.append(row + artificial + [b])
    basis = [n + i for i in range(m)]

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    _optimize(tableau, basis, phase1, range(n + m))
    if any(tableau[i][-1] > 0 for i, b in enumerate(basis) if b >= n):
        raise InfeasibleSystemError("exponent system has no feasible point")

    # drive remaining (zero) artificials out of the basis
    for i in range(m - 1, -1, -1):
        if basis[i] >= n:
            col = next((j for j in range(n) if tableau[i][j] != 0), None)
            if col is None:
                del tableau[i]
                del basis[i]
            else:
                _pivot(tableau, basis, i, col)

    phase2 = [Fraction(c) for c in cost] + [Fraction(0)] * m
    _optimize(tableau, basis, phase2, range(n))

    solution = [Fraction(0)] * n
    for i, b in enumerate(basis):
        solution[b] = tableau[i][-1]
    return solution


def lp_relaxation(objective="max", fixed=None):
    """Rational optimum of the exponent system.

    Parameters
    ----------
    objective : {"max", "sum"}
        minimize the largest exponent, or the sum of exponents
    fixed : dict, optional
        variables held at given values

    Returns
    -------
    (dict, Fraction)
        optimal values by name and the objective value
    """

    if objective not in OBJECTIVES:
        raise ValueError("unknown objective {!r}".format(objective))

    fixed = {k: Fraction(v) for k, v in (fixed or {}).items()}
    free = [name for name in VARIABLES if name not in fixed]
    use_t = objective == "max"
    n_free = len(free)
    width = n_free + (1 if use_t else 0)

    rows, rhs = [], []
    constraints = list(CONSTRAINTS)
    for label, coeffs in constraints:
        shift = sum(Fraction(a) * fixed[k] for k, a in coeffs.items() if k in fixed)
        row = [Fraction(coeffs.get(name, 0)) for name in free] + [Fraction(0)] * (width - n_free)
        rows.append(row)
        rhs.append(1 - shift)

    if use_t:
        # t - v >= 0 for every free variable
        for i in range(n_free):
            row = [Fraction(0)] * width
            row[i] = Fraction(-1)
            row[-1] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(0))

    # surplus variables turn a . v >= b into a . v - s = b
    m = len(rows)
    equality = [row + [Fraction(-int(i == j)) for j in range(m)] for i, row in enumerate(rows)]
    if use_t:
        cost = [Fraction(0)] * n_free + [Fraction(1)]
    else:
        cost = [Fraction(1)] * n_free
    cost = cost + [Fraction(0)] * m

    solution = solve_lp(equality, rhs, cost)
    values = dict(fixed)
    values.update({name: solution[i] for i, name in enumerate(free)})
    if use_t:
        value = max(values[name] for name in free) if free else Fraction(0)
    else:
        value = sum(values[name] for name in free)
    return values, value


def _first_violation(values):
    for label, coeffs in CONSTRAINTS:
        if _lhs(coeffs, values) < 1:
            return label, coeffs
    return None


def round_and_repair(values, fixed=None):
    """Integer point from a rational feasible one.

    Each exponent is rounded up; while some constraint fails, the free
    variable with the largest positive coefficient in the first failing
    constraint is incremented.  If that does not converge within
    MAX_REPAIRS steps, the rational point is scaled by 1 + max sum |a| (the
    system is homogeneous up to its unit right-hand side) and rounded up,
    which is always feasible.
    """

    fixed = fixed or {}
    current = {k: Fraction(math.ceil(v)) if k not in fixed else Fraction(v) for k, v in values.items()}

    for _ in range(MAX_REPAIRS):
        violation = _first_violation(current)
        if violation is None:
            return current
        _, coeffs = violation
        candidates = [(a, k) for k, a in coeffs.items() if a > 0 and k not in fixed]
        if not candidates:
            break
        _, name = max(candidates, key=lambda c: (c[0], -VARIABLES.index(c[1])))
        current[name] += 1

    log.warning("Rounding repair did not converge; falling back to scaled rounding")
    scale = 1 + max(sum(abs(a) for a in coeffs.values()) for _, coeffs in CONSTRAINTS)
    return {k: Fraction(math.ceil(scale * v)) if k not in fixed else Fraction(v) for k, v in values.items()}


def minimize_exponents(objective="max", fixed=None):
    """Integer exponent assignment optimal for the objective.

    Solves the rational relaxation exactly, rounds and repairs to integers
    and re-verifies with check_exponent_system.

    Parameters
    ----------
    objective : {"max", "sum"}, optional (default: "max")
    fixed : dict, optional

    Returns
    -------
    ExponentAssignment
    """

    values, bound = lp_relaxation(objective, fixed)
    log.info("Exponent LP bound ({}): {}".format(objective, bound))

    assignment = ExponentAssignment.from_dict(round_and_repair(values, fixed))
    check = check_exponent_system(assignment)
    if not check.passed:
        raise InfeasibleSystemError(
            "rounded exponents violate {}".format(", ".join(check.violations))
        )
    return assignment


def brute_force_minimum(fixed, free=("x0", "y0", "x1"), limit=None):
    """Smallest sum of the free exponents over all feasible integer points.

    Exhaustive search over free variables in [0, limit] (the remaining ones
    held at `fixed`), restricted to points whose sum is at most limit.  The
    first free variable is looped over; the other two form a numpy grid.

    Returns
    -------
    int or None
        None when no feasible point lies in the box
    """

    if len(free) != 3:
        raise ValueError("brute force search takes exactly three free variables")
    if limit is None:
        _, bound = lp_relaxation("sum", fixed)
        limit = int(math.ceil(bound))

    fixed = {k: int(v) for k, v in fixed.items()}
    outer, first, second = free
    grid_a, grid_b = np.meshgrid(np.arange(limit + 1), np.arange(limit + 1), indexing="ij")
    grid_a = grid_a.astype(np.int64)
    grid_b = grid_b.astype(np.int64)

    best = None
    for value in range(limit + 1):
        budget = limit - value
        a = grid_a[: budget + 1, : budget + 1]
        b = grid_b[: budget + 1, : budget + 1]
        feasible = (a + b) <= budget
        for _, coeffs in CONSTRAINTS:
            lhs = np.zeros_like(a)
            for name, coeff in coeffs.items():
                if name == outer:
                    lhs = lhs + coeff * value
                elif name == first:
                    lhs = lhs + coeff * a
                elif name == second:
                    lhs = lhs + coeff * b
                else:
                    lhs = lhs + coeff * fixed[name]
            feasible &= lhs >= 1
            if not feasible.any():
                break

        if feasible.any():
            total = int((value + a + b)[feasible].min())
            best = total if best is None else min(best, total)

    return best
