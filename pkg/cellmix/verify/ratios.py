"""Empirical ratio brackets of Phi against the weighted H^1 norm and against Psi."""

from dataclasses import dataclass, field
import logging

import numpy as np
import pandas as pd

from cellmix.errors import NonZeroMeanError
from cellmix.spectral.fields import norm6
from cellmix.twopoint.functionals import phi_psi, lyapunov_phi, weighted_h1_norm
from cellmix.twopoint.state import max_x_mean, random_two_point


log = logging.getLogger(__name__)

# x~-mean tolerance relative to the L2 norm
MEAN_TOL = 1e-12


@dataclass
class RatioReport:
    """Max of Phi / Psi over a sample set.

    Attributes
    ----------
    max_ratio : float
    ratios : pandas.Series
        per-sample ratio; NaN for excluded 0 / 0 samples
    violations : list of int
        samples with Psi = 0 but Phi > 0
    """

    max_ratio: float
    ratios: pd.Series
    violations: list = field(default_factory=list)


def random_samples(count, n=8, seed=0, nu=4.0, kappa=0.0, kmax=1):
    """Random x~-mean-zero two-point states."""
    return [random_two_point(n, seed, i, kmax=kmax, nu=nu, kappa=kappa) for i in range(count)]


def phi_h1_ratios(states, coeffs):
    ratios = []
    for state in states:
        h1 = weighted_h1_norm(state)
        ratios.append(lyapunov_phi(state, coeffs) / h1 ** 2 if h1 > 0 else np.nan)
    return pd.Series(ratios, name="phi_h1")


def phi_h1_ratio_bracket(states, coeffs):
    """[min, max] of Phi(f) / ||f||^2 over the samples (zero fields skipped)."""
    ratios = phi_h1_ratios(states, coeffs).dropna()
    return float(ratios.min()), float(ratios.max())


def phi_psi_ratio(state, coeffs):
    """Phi / Psi of a single state, NaN for 0 / 0."""
    phi, psi = phi_psi(state, coeffs)
    if psi > 0:
        return phi / psi
    return np.nan if phi == 0 else np.inf


def psi_controls_phi_ratio(states, coeffs, require_mean_zero=True):
    """Largest Phi / Psi over x~-mean-zero samples.

    A sample with Psi = 0 and Phi > 0 would contradict the Poincare-Hardy
    inequality; such samples are reported in `violations`.

    Returns
    -------
    RatioReport
    """

    ratios = []
    violations = []
    for i, state in enumerate(states):
        if require_mean_zero:
            scale = max(norm6(state.values), np.finfo(float).tiny)
            if max_x_mean(state.values) > MEAN_TOL * scale:
                raise NonZeroMeanError(
                    "sample {} has x-mean {:.3e}".format(i, max_x_mean(state.values))
                )

        ratio = phi_psi_ratio(state, coeffs)
        if np.isinf(ratio):
            log.warning("Sample {} has zero dissipation but positive Phi".format(i))
            violations.append(i)
        ratios.append(ratio)

    ratios = pd.Series(ratios, name="phi_psi")
    finite = ratios[np.isfinite(ratios)]
    max_ratio = float(finite.max()) if len(finite) else np.nan
    return RatioReport(max_ratio, ratios, violations)
