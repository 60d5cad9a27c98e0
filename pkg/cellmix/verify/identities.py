"""Residuals of the structural operator identities on sample fields."""

import logging

import numpy as np
import pandas as pd

from cellmix.spectral.fields import inner6
from cellmix.twopoint.operators import (
    Y_AXES,
    DerivativeCache,
    bracket,
    coefficient_residual,
    commutator,
    derivative,
    max_coefficient,
    operator_family,
    pointwise_norm,
    q2_operator,
    r2_operator,
    s2_first_doubled,
    trig_tables,
)


log = logging.getLogger(__name__)

# relative residual accepted for exact identities
IDENTITY_TOL = 1e-11

# frozen constant of the pointwise remainder bounds
REMAINDER_BOUND = 200.0

# y-Laplacian eigenvalues of the commutator coefficients
LAPLACE_Y_EIGENVALUES = {"C1": -1.0, "C2": -2.0, "C3": -5.0}


def relative_residual(lhs, rhs):
    """max |lhs - rhs| / max(|lhs|, |rhs|) over lists of arrays."""
    diff = max(float(np.abs(a - b).max()) for a, b in zip(lhs, rhs))
    scale = max(max(float(np.abs(a).max()), float(np.abs(b).max())) for a, b in zip(lhs, rhs))
    return diff / scale if scale > 0 else diff


def _ops(n):
    return operator_family(n)


### f-independent identities of the coefficients


def laplace_y_residual(name, n):
    """Coefficientwise Lap_y C = lambda C for C1, C2, C3."""
    op = _ops(n)[name]
    lap = op.map_coefficients(lambda c: derivative(c, 4, 2) + derivative(c, 5, 2))
    expected = op.map_coefficients(lambda c: LAPLACE_Y_EIGENVALUES[name] * c)
    return coefficient_residual(lap, expected) / max_coefficient(op)


def s1_derivative_residual(n):
    """(S1)_i = -d_{y_i} (C1)_i and d_{y_i} (S1)_i = (C1)_i, worst of both."""
    ops = _ops(n)
    worst = 0.0
    for i, axis in enumerate(Y_AXES):
        c1, s1 = ops["C1"][i], ops["S1"][i]
        down = c1.map_coefficients(lambda c: -derivative(c, axis))
        up = s1.map_coefficients(lambda c: derivative(c, axis))
        worst = max(worst, coefficient_residual(down, s1), coefficient_residual(up, c1))
    return worst / max_coefficient(ops["C1"])


def c1_s1_bracket_residual(n):
    """[(C1)_i, (S1)_i] = 0."""
    ops = _ops(n)
    worst = 0.0
    for i in range(2):
        result = bracket(ops["C1"].components[i], ops["S1"].components[i])
        worst = max([worst] + [float(np.abs(c).max()) for c in result.values()])
    return worst


def divergence_y_coefficients(n):
    """sum_i d_{y_i} applied to the coefficients of (C1)_i, as an operator."""
    c1 = _ops(n)["C1"]
    total = None
    for i, axis in enumerate(Y_AXES):
        part = c1[i].map_coefficients(lambda c: derivative(c, axis))
        total = part if total is None else total + part
    return total


### identities applied to a field


def defining_commutator_residual(f):
    """C1 f against grad_y(A f) - A(grad_y f)."""
    cache = DerivativeCache(f)
    ops = _ops(cache.shape[0])
    af = DerivativeCache(ops["A"].apply(cache)[0])
    rhs = [af.d(axis) - ops["A"].apply(cache, base=(axis,))[0] for axis in Y_AXES]
    return relative_residual(ops["C1"].apply(cache), rhs)


def divergence_residual(f):
    """sum_i d_{y_i} (C1 f)_i - sum_i (C1)_i d_{y_i} f = -A f."""
    cache = DerivativeCache(f)
    ops = _ops(cache.shape[0])
    c1 = ops["C1"]
    c1f = c1.apply(cache)
    lhs = 0.0
    for i, axis in enumerate(Y_AXES):
        lhs = lhs + DerivativeCache(c1f[i]).d(axis) - c1[i].apply(cache, base=(axis,))[0]
    coefficient_form = divergence_y_coefficients(cache.shape[0]).apply(cache)[0]
    rhs = -ops["A"].apply(cache)[0]
    return max(relative_residual([lhs], [rhs]), relative_residual([coefficient_form], [rhs]))


def pythagorean_residual(f):
    """|M1 grad f|^2 - |C1 f|^2 - |S1 f|^2, relative to |M1 grad f|^2."""
    cache = DerivativeCache(f)
    ops = _ops(cache.shape[0])
    m1 = pointwise_norm(ops["M1"].apply(cache)) ** 2
    rest = pointwise_norm(ops["C1"].apply(cache)) ** 2 + pointwise_norm(ops["S1"].apply(cache)) ** 2
    return relative_residual([m1], [rest])


def lower_bound_violations(f, tol=1e-12):
    """Lattice points where |M2 grad f|^2 > |C2 f|^2 + |S2 f|^2 + 3 |M1 grad f|^2."""
    cache = DerivativeCache(f)
    ops = _ops(cache.shape[0])
    lhs = pointwise_norm(ops["M2"].apply(cache)) ** 2
    rhs = (
        pointwise_norm(ops["C2"].apply(cache)) ** 2
        + pointwise_norm(ops["S2"].apply(cache)) ** 2
        + 3 * pointwise_norm(ops["M1"].apply(cache)) ** 2
    )
    return int(np.count_nonzero(lhs > rhs + tol * max(float(rhs.max()), 1.0)))


def r2_residual(f):
    """[C1, A] f - C2 f - R2 f."""
    cache = DerivativeCache(f)
    n = cache.shape[0]
    ops = _ops(n)
    lhs = commutator(ops["C1"], ops["A"]).apply(cache)
    rhs = (ops["C2"] + r2_operator(trig_tables(n))).apply(cache)
    return relative_residual(lhs, rhs)


def q2_residual(f):
    """[S1, A] f - (1, -1)^T (S2 f)_1 - Q2 f."""
    cache = DerivativeCache(f)
    n = cache.shape[0]
    ops = _ops(n)
    t = trig_tables(n)
    lhs = commutator(ops["S1"], ops["A"]).apply(cache)
    rhs = (s2_first_doubled(t) + q2_operator(t)).apply(cache)
    return relative_residual(lhs, rhs)


def _bound_ratio(lhs, rhs, floor=1e-12):
    """max lhs / rhs where rhs is resolved; lhs must vanish where it is not."""
    scale = float(rhs.max())
    resolved = rhs > floor * scale
    ratio = float((lhs[resolved] / rhs[resolved]).max()) if resolved.any() else 0.0
    unresolved = float(lhs[~resolved].max()) if (~resolved).any() else 0.0
    if unresolved > 1e-9 * max(float(lhs.max()), 1.0):
        return np.inf
    return ratio


def third_order_ratio(f):
    """max |[C2, A] f - C3 f| / (|M1 grad f| + |M2 grad f|)."""
    cache = DerivativeCache(f)
    ops = _ops(cache.shape[0])
    remainder = commutator(ops["C2"], ops["A"]) - ops["C3"]
    lhs = pointwise_norm(remainder.apply(cache))
    rhs = pointwise_norm(ops["M1"].apply(cache)) + pointwise_norm(ops["M2"].apply(cache))
    return _bound_ratio(lhs, rhs)


def fourth_order_ratio(f):
    """max (|[C3, A] f| + |[grad', A] f|) / (|M1 grad f| + |M2 grad f| + |grad' f|)."""
    cache = DerivativeCache(f)
    ops = _ops(cache.shape[0])
    lhs = pointwise_norm(commutator(ops["C3"], ops["A"]).apply(cache)) + pointwise_norm(
        commutator(ops["grad'"], ops["A"]).apply(cache)
    )
    rhs = (
        pointwise_norm(ops["M1"].apply(cache))
        + pointwise_norm(ops["M2"].apply(cache))
        + pointwise_norm(ops["grad'"].apply(cache))
    )
    return _bound_ratio(lhs, rhs)


def skew_residual(f):
    """<A f, f> / ||f||^2, zero for the divergence-free transport."""
    af = _ops(f.shape[0])["A"].apply(f)[0]
    return abs(inner6(af, f)) / inner6(f, f)


FIELD_IDENTITIES = [
    ("defining_commutator", defining_commutator_residual, IDENTITY_TOL),
    ("divergence_y", divergence_residual, IDENTITY_TOL),
    ("pythagorean", pythagorean_residual, IDENTITY_TOL),
    ("r2_decomposition", r2_residual, IDENTITY_TOL),
    ("q2_decomposition", q2_residual, IDENTITY_TOL),
    ("skew_symmetry", skew_residual, IDENTITY_TOL),
    ("lower_bound_violations", lower_bound_violations, 0),
    ("third_order_ratio", third_order_ratio, REMAINDER_BOUND),
    ("fourth_order_ratio", fourth_order_ratio, REMAINDER_BOUND),
]


def run_identity_suite(states):
    """Worst value of every identity over the sample states.

    Returns
    -------
    pandas.DataFrame
        columns identity, value, tolerance, passed
    """

    n = states[0].n
    rows = [
        ("laplace_y_" + name, laplace_y_residual(name, n), IDENTITY_TOL)
        for name in LAPLACE_Y_EIGENVALUES
    ]
    rows.append(("s1_derivative", s1_derivative_residual(n), IDENTITY_TOL))
    rows.append(("c1_s1_bracket", c1_s1_bracket_residual(n), IDENTITY_TOL))

    for name, func, tol in FIELD_IDENTITIES:
        worst = max(func(state.values) for state in states)
        rows.append((name, worst, tol))
        log.debug("{}: {:.3e}".format(name, worst))

    df = pd.DataFrame(rows, columns=["identity", "value", "tolerance"])
    df["passed"] = df["value"] <= df["tolerance"]
    return df
