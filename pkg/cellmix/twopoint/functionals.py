"""Lyapunov functional Phi, dissipation functional Psi and the weighted H^1 norm.

Coefficients span hundreds of orders of magnitude (eps^493), so every term
is kept as (log coefficient, quantity) and the sums are formed with
scipy.special.logsumexp.
"""

from dataclasses import dataclass
from fractions import Fraction
import logging
import math

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from cellmix.spectral.fields import TWO_PI, check_grid6, evaluate, norm6
from cellmix.twopoint.operators import (
    X_AXES,
    Y_AXES,
    DerivativeCache,
    axis_grid,
    operator_family,
    trig_tables,
)


log = logging.getLogger(__name__)

PUBLISHED_EXPONENTS = {
    "x": (256, 448, 488, 492),
    "y": (384, 480, 493),
    "z": (472, 491),
}

PRESETS = ("published", "moderate", "paper")

# alternate preset names
ALIASES = {"paper": "published"}


@dataclass(frozen=True)
class CoefficientSet:
    """Coefficients alpha_0..3, beta_0..2, gamma_1..2 and delta.

    alpha_i = eps^x_i nu^-2i, beta_i = eps^y_i nu^-(2i+1),
    gamma_i = eps^z_i nu^-2i and delta = eps, each kept as a
    (log mantissa, nu power) pair.

    Attributes
    ----------
    epsilon : float
        in (0, 1)
    nu : float
    x : tuple of 4 exponents
    y : tuple of 3 exponents
    z : tuple of 2 exponents (gamma_1, gamma_2)
    """

    epsilon: float
    nu: float
    x: tuple
    y: tuple
    z: tuple

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1), got {}".format(self.epsilon))
        if not self.nu > 0:
            raise ValueError("nu must be positive, got {}".format(self.nu))
        if len(self.x) != 4 or len(self.y) != 3 or len(self.z) != 2:
            raise ValueError("expected 4 x, 3 y and 2 z exponents")

    def pair(self, name, i):
        """(log mantissa, nu power) of alpha_i, beta_i, gamma_i or delta."""
        log_eps = math.log(self.epsilon)
        if name == "alpha":
            return float(self.x[i]) * log_eps, -2 * i
        if name == "beta":
            return float(self.y[i]) * log_eps, -(2 * i + 1)
        if name == "gamma":
            return float(self.z[i - 1]) * log_eps, -2 * i
        if name == "delta":
            return log_eps, 0
        raise KeyError(name)

    def log(self, name, i=0):
        mantissa, power = self.pair(name, i)
        return mantissa + power * math.log(self.nu)

    def value(self, name, i=0):
        return math.exp(self.log(name, i))

    def to_frame(self):
        rows = []
        for name, indices in (("alpha", range(4)), ("beta", range(3)), ("gamma", (1, 2)), ("delta", (0,))):
            for i in indices:
                mantissa, power = self.pair(name, i)
                rows.append(
                    {
                        "coefficient": "{}{}".format(name, i if name != "delta" else ""),
                        "log_mantissa": mantissa,
                        "nu_power": power,
                        "log_value": self.log(name, i),
                    }
                )
        return pd.DataFrame(rows)


def preset(name, epsilon=None, nu=None):
    """Named coefficient sets.

    "published" uses the integer exponents that satisfy the full exponent
    system; "moderate" divides them by 64 (eps = 0.5, nu = 4) so that all
    terms of Phi and Psi stay visible in double precision. "paper" is accepted
    for "published".
    """

    name = ALIASES.get(name, name)
    if name == "published":
        return CoefficientSet(
            0.1 if epsilon is None else epsilon,
            4.0 if nu is None else nu,
            PUBLISHED_EXPONENTS["x"],
            PUBLISHED_EXPONENTS["y"],
            PUBLISHED_EXPONENTS["z"],
        )
    if name == "moderate":
        scaled = {
            key: tuple(Fraction(v, 64) for v in values) for key, values in PUBLISHED_EXPONENTS.items()
        }
        return CoefficientSet(
            0.5 if epsilon is None else epsilon,
            4.0 if nu is None else nu,
            scaled["x"],
            scaled["y"],
            scaled["z"],
        )
    raise ValueError("unknown coefficient preset {!r}".format(name))


### norms


def _sq(components):
    """Squared L2 norm of a vector field given as component arrays."""
    return sum(norm6(c) ** 2 for c in components)


def _dot(a, b):
    return sum(TWO_PI ** 6 * np.mean(u * v) for u, v in zip(a, b))


def _derivs(cache, axes, base=()):
    return [cache.d(*base, axis) for axis in axes]


def _applied(op, cache, bases):
    """Components of op applied to d_b f for every b in bases, concatenated."""
    out = []
    for base in bases:
        out.extend(op.apply(cache, base=base))
    return out


def weighted_h1_norm(state):
    """||f|| + ||d1 f|| + ||d2 f|| + ||w d3 f|| + ||w d4 f|| + sqrt(kt) ||grad_x f|| + ||grad_y f||

    with w = sqrt(s3^2 + s4^2) vanishing on the degeneracy planes.
    """

    cache = DerivativeCache(state.values)
    weight = trig_tables(state.n).weight

    total = norm6(state.values)
    total += norm6(cache.d(0)) + norm6(cache.d(1))
    total += norm6(weight * cache.d(2)) + norm6(weight * cache.d(3))
    if state.kappa_tilde > 0:
        total += math.sqrt(state.kappa_tilde) * math.sqrt(_sq(_derivs(cache, X_AXES)))
    total += math.sqrt(_sq(_derivs(cache, Y_AXES)))
    return float(total)


def untilt_index(n):
    """Original lattice indices (x1, x2, z1, z2, y1, y2) of every tilted lattice point.

    ``original[untilt_index(n)]`` is the tilted field of an array sampled on
    the original lattice.  The map is two-to-one in each (x~i, x~i+2) pair and
    reaches exactly the original points with x_i + z_i even.

    Returns
    -------
    tuple of six int ndarrays, broadcasting to shape (n,) * 6
    """

    i1, i2, i3, i4, j1, j2 = np.ogrid[(slice(0, n),) * 6]
    return (
        (i1 - i3) % n,
        (i2 - i4) % n,
        (i1 + i3) % n,
        (i2 + i4) % n,
        (-j2) % n,
        (-j1) % n,
    )


def original_product(theta0, rho0, n):
    """theta0(x) theta0(z) rho0(y) on the untilted lattice, axes (x1, x2, z1, z2, y1, y2)."""
    x = TWO_PI * np.arange(n) / n
    theta = evaluate(theta0, x[:, None], x[None, :])
    if rho0 is None:
        density = np.full((n, n), TWO_PI ** -2)
    else:
        density = evaluate(rho0, x[:, None], x[None, :])
    return (
        theta[:, :, None, None, None, None]
        * theta[None, None, :, :, None, None]
        * density[None, None, None, None, :, :]
    )


def original_weighted_h1_norm(theta0, rho0=None, n=12, kappa=0.0):
    """The weighted norm evaluated in original coordinates (x, z, y).

    ||f|| + ||grad_y f|| + ||(dx1 + dz1) f|| + ||(dx2 + dz2) f||
      + ||dD (dz1 - dx1) f|| + ||dD (dz2 - dx2) f|| + sqrt(kappa) ||grad_(x,z) f||

    with dD = sqrt(sin^2((z1 - x1)/2) + sin^2((z2 - x2)/2)), for the product
    datum theta0(x) theta0(z) rho0(y).
    """

    check_grid6(n)
    values = original_product(theta0, rho0, n)
    cache = DerivativeCache(values)
    x1, x2, z1, z2 = (axis_grid(n, axis) for axis in range(4))
    d_diag = np.sqrt(np.sin((z1 - x1) / 2) ** 2 + np.sin((z2 - x2) / 2) ** 2)

    total = norm6(values)
    total += math.sqrt(_sq(_derivs(cache, Y_AXES)))
    total += norm6(cache.d(0) + cache.d(2)) + norm6(cache.d(1) + cache.d(3))
    total += norm6(d_diag * (cache.d(2) - cache.d(0)))
    total += norm6(d_diag * (cache.d(3) - cache.d(1)))
    if kappa > 0:
        total += math.sqrt(kappa) * math.sqrt(_sq(_derivs(cache, X_AXES)))
    return float(total)


### Phi and Psi


def _combine(terms):
    """Signed log-sum of (name, log coefficient, quantity) terms."""
    logs = np.array([t[1] for t in terms], dtype=float)
    quantities = np.array([t[2] for t in terms], dtype=float)
    with np.errstate(divide="ignore"):
        a = logs + np.log(np.abs(quantities))
    signs = np.sign(quantities)
    if not np.any(signs):
        return 0.0
    value, sign = logsumexp(a, b=signs, return_sign=True)
    return float(sign * np.exp(value))


def _frame(terms):
    df = pd.DataFrame(terms, columns=["term", "log_coefficient", "quantity"])
    with np.errstate(over="ignore"):
        df["value"] = np.exp(df["log_coefficient"]) * df["quantity"]
    return df.set_index("term")


def phi_terms(state, coeffs, cache=None):
    """Terms of Phi as (name, log coefficient, quantity) rows.

    Phi = 1/2 ||f||^2 + a0/2 ||grad_y f||^2 + kt d/2 ||grad_x f||^2
        + b0 <grad_y f, C1 f> + a1/2 ||C1 f||^2 + g1/2 ||S1 f||^2
        + b1 <C1 f, C2 f> + a2/2 ||C2 f||^2 + g2/2 ||S2 f||^2
        + b2 <C2 f, C3 f> + a3/2 ||grad' f||^2

    with kt the tilted diffusivity.

    Returns
    -------
    pandas.DataFrame
        indexed by term, columns log_coefficient, quantity, value
    """

    cache = cache or DerivativeCache(state.values)
    ops = operator_family(state.n)
    half = math.log(0.5)

    grad_y = _derivs(cache, Y_AXES)
    c1 = ops["C1"].apply(cache)
    c2 = ops["C2"].apply(cache)
    c3 = ops["C3"].apply(cache)

    terms = [
        ("f", half, _sq([state.values])),
        ("grad_y", half + coeffs.log("alpha", 0), _sq(grad_y)),
    ]
    if state.kappa_tilde > 0:
        terms.append(
            (
                "grad_x",
                half + math.log(state.kappa_tilde) + coeffs.log("delta"),
                _sq(_derivs(cache, X_AXES)),
            )
        )
    terms += [
        ("grad_y.C1", coeffs.log("beta", 0), _dot(grad_y, c1)),
        ("C1", half + coeffs.log("alpha", 1), _sq(c1)),
        ("S1", half + coeffs.log("gamma", 1), _sq(ops["S1"].apply(cache))),
        ("C1.C2", coeffs.log("beta", 1), _dot(c1, c2)),
        ("C2", half + coeffs.log("alpha", 2), _sq(c2)),
        ("S2", half + coeffs.log("gamma", 2), _sq(ops["S2"].apply(cache))),
        ("C2.C3", coeffs.log("beta", 2), _dot(c2, c3)),
        ("grad'", half + coeffs.log("alpha", 3), _sq(ops["grad'"].apply(cache))),
    ]
    return _frame(terms)


def psi_terms(state, coeffs, cache=None):
    """Terms of the dissipation functional Psi.

    nu-terms: ||grad_y f||^2, a0 ||Lap_y f||^2, a1 ||C1 grad_y f||^2,
    g1 ||S1 grad_y f||^2, a2 ||C2 grad_y f||^2, g2 ||S2 grad_y f||^2 and
    a3 ||grad' grad_y f||^2; commutator terms b0 ||C1 f||^2, b1 ||C2 f||^2,
    b2 ||C3 f||^2; for kt > 0 the bracket kt [||grad_x f||^2
    + a0 ||grad_x grad_y f||^2 + kt d ||Lap_x f||^2 + a1 ||C1 grad_x f||^2
    + g1 ||S1 grad_x f||^2 + a2 ||C2 grad_x f||^2 + g2 ||S2 grad_x f||^2
    + a3 ||grad' grad_x f||^2].
    """

    cache = cache or DerivativeCache(state.values)
    ops = operator_family(state.n)
    log_nu = math.log(state.nu)
    y_bases = [(axis,) for axis in Y_AXES]

    laplace_y = sum(cache.d(axis, axis) for axis in Y_AXES)
    terms = [
        ("nu grad_y", log_nu, _sq(_derivs(cache, Y_AXES))),
        ("nu Lap_y", log_nu + coeffs.log("alpha", 0), _sq([laplace_y])),
        ("C1", coeffs.log("beta", 0), _sq(ops["C1"].apply(cache))),
        ("nu C1 grad_y", log_nu + coeffs.log("alpha", 1), _sq(_applied(ops["C1"], cache, y_bases))),
        ("nu S1 grad_y", log_nu + coeffs.log("gamma", 1), _sq(_applied(ops["S1"], cache, y_bases))),
        ("C2", coeffs.log("beta", 1), _sq(ops["C2"].apply(cache))),
        ("nu C2 grad_y", log_nu + coeffs.log("alpha", 2), _sq(_applied(ops["C2"], cache, y_bases))),
        ("nu S2 grad_y", log_nu + coeffs.log("gamma", 2), _sq(_applied(ops["S2"], cache, y_bases))),
        ("C3", coeffs.log("beta", 2), _sq(ops["C3"].apply(cache))),
        (
            "nu grad' grad_y",
            log_nu + coeffs.log("alpha", 3),
            _sq(_applied(ops["grad'"], cache, y_bases)),
        ),
    ]

    if state.kappa_tilde > 0:
        log_k = math.log(state.kappa_tilde)
        x_bases = [(axis,) for axis in X_AXES]
        laplace_x = sum(cache.d(axis, axis) for axis in X_AXES)
        mixed = [cache.d(i, j) for i in X_AXES for j in Y_AXES]
        terms += [
            ("k grad_x", log_k, _sq(_derivs(cache, X_AXES))),
            ("k grad_x grad_y", log_k + coeffs.log("alpha", 0), _sq(mixed)),
            ("k^2 Lap_x", 2 * log_k + coeffs.log("delta"), _sq([laplace_x])),
            ("k C1 grad_x", log_k + coeffs.log("alpha", 1), _sq(_applied(ops["C1"], cache, x_bases))),
            ("k S1 grad_x", log_k + coeffs.log("gamma", 1), _sq(_applied(ops["S1"], cache, x_bases))),
            ("k C2 grad_x", log_k + coeffs.log("alpha", 2), _sq(_applied(ops["C2"], cache, x_bases))),
            ("k S2 grad_x", log_k + coeffs.log("gamma", 2), _sq(_applied(ops["S2"], cache, x_bases))),
            (
                "k grad' grad_x",
                log_k + coeffs.log("alpha", 3),
                _sq(_applied(ops["grad'"], cache, x_bases)),
            ),
        ]
    return _frame(terms)


def lyapunov_phi(state, coeffs, cache=None):
    """Phi(f) combined from phi_terms with a signed log-sum.

    A negative value means the beta cross terms are not dominated, i.e. the
    coefficients are outside their admissible range; this is logged.
    """

    terms = phi_terms(state, coeffs, cache)
    value = _combine(list(zip(terms.index, terms["log_coefficient"], terms["quantity"])))
    if value < 0:
        log.warning("Lyapunov functional is negative ({:.3e}); check the coefficients".format(value))
    return value


def dissipation_psi(state, coeffs, cache=None):
    terms = psi_terms(state, coeffs, cache)
    return _combine(list(zip(terms.index, terms["log_coefficient"], terms["quantity"])))


def phi_psi(state, coeffs):
    """(Phi, Psi) sharing one derivative cache."""
    cache = DerivativeCache(state.values)
    return lyapunov_phi(state, coeffs, cache), dissipation_psi(state, coeffs, cache)
