"""Exponential decay fits on recorded norm series."""

from dataclasses import dataclass, asdict
import logging

import numpy as np
import pandas as pd
from scipy.stats import linregress


log = logging.getLogger(__name__)

# share of the horizon dropped as transient when no window is given
TRANSIENT_FRACTION = 0.2


@dataclass
class DecayFit:
    """Least-squares fit log(value) = intercept - rate * t.

    Attributes
    ----------
    rate : float
        fitted decay rate, >= 0
    intercept : float
    t0, t1 : float
        fit window actually used
    r_squared : float
        computed on the log-values, NaN for a constant series
    series_id : str
    points : int
    """

    rate: float
    intercept: float
    t0: float
    t1: float
    r_squared: float
    series_id: str = ""
    points: int = 0

    def to_dict(self):
        return asdict(self)


def default_window(times):
    t_min, t_max = float(np.min(times)), float(np.max(times))
    return t_min + TRANSIENT_FRACTION * (t_max - t_min), t_max


def fit_decay(series, column="h_minus1", window=None, series_id=""):
    """Fit an exponential decay rate to one column of a norm series.

    Parameters
    ----------
    series : pandas.DataFrame
        must have a "t" column and `column`
    column : str, optional (default: "h_minus1")
    window : (t0, t1), optional
        defaults to the horizon minus its first 20%
    series_id : str, optional

    Returns
    -------
    DecayFit
    """

    t0, t1 = default_window(series["t"]) if window is None else window
    inside = series.loc[(series["t"] >= t0 - 1e-12) & (series["t"] <= t1 + 1e-12)]
    t = inside["t"].to_numpy(dtype=float)
    values = inside[column].to_numpy(dtype=float)

    bad = np.flatnonzero(~(values > 0))
    if len(bad):
        log.warning(
            "{} hit zero at t={:.6g}; window truncated to {:,} points".format(
                column, t[bad[0]], bad[0]
            )
        )
        t, values = t[: bad[0]], values[: bad[0]]

    if len(t) < 2:
        raise ValueError("need at least 2 positive records in [{}, {}]".format(t0, t1))

    logs = np.log(values)
    if np.ptp(logs) == 0:
        return DecayFit(0.0, float(logs[0]), t[0], t[-1], np.nan, series_id, len(t))

    result = linregress(t, logs)
    rate = -result.slope
    if rate < 0:
        log.warning("{} grows at rate {:.3e}; clipped to 0".format(series_id or column, -rate))
        rate = 0.0

    return DecayFit(
        rate=float(rate),
        intercept=float(result.intercept),
        t0=float(t[0]),
        t1=float(t[-1]),
        r_squared=float(result.rvalue ** 2),
        series_id=series_id,
        points=len(t),
    )


def fits_frame(fits):
    return pd.DataFrame([fit.to_dict() for fit in fits])


def random_prefactor(series, rate, column="h_minus1"):
    """sup over integer times of ||theta(n)|| e^{rate n / 2} / ||theta_0||_L2."""
    t = series["t"].to_numpy(dtype=float)
    integral = np.isclose(t, np.round(t), atol=1e-9)
    l2_initial = float(series["l2"].iloc[0])
    scaled = series[column].to_numpy(dtype=float)[integral] * np.exp(0.5 * rate * t[integral])
    return float(scaled.max() / l2_initial)


def prefactor_moments(values, q=(1, 2, 4)):
    """Empirical E[C^q] over realizations."""
    values = np.asarray(values, dtype=float)
    return pd.DataFrame({"q": list(q), "moment": [float(np.mean(values ** p)) for p in q]})
