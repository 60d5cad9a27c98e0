"""Mixing-rate experiments over independent realizations of the shift path."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from cellmix.config import resolve
from cellmix.experiments.fitting import (
    fit_decay,
    fits_frame,
    prefactor_moments,
    random_prefactor,
)
from cellmix.scalar.solver import SimulationConfig, solve


log = logging.getLogger(__name__)

AVERAGED_COLUMNS = ["h_minus1", "h_minus2", "l2"]


@dataclass
class MixingResult:
    """Per-realization and averaged fits of one mixing experiment.

    Attributes
    ----------
    fits : pandas.DataFrame
        one DecayFit row per realization
    averaged : pandas.DataFrame
        realization-averaged norm series
    averaged_fit : DecayFit
        fit of the averaged H^-1 series
    averaged_h2_fit : DecayFit
        fit of the averaged H^-2 series
    dispersion : float
        standard deviation of the per-realization rates
    prefactors : pandas.DataFrame
        random prefactor C per realization and its moments
    series : pandas.DataFrame
        all recorded norm series, stacked
    """

    fits: pd.DataFrame
    averaged: pd.DataFrame
    averaged_fit: object
    averaged_h2_fit: object
    dispersion: float
    prefactors: pd.DataFrame
    series: pd.DataFrame

    @property
    def rates(self):
        return self.fits["rate"]


def run_realization(settings, realization):
    return solve(SimulationConfig.from_settings(settings, realization))


def run_realizations(settings, realizations, workers=1):
    """Norm series of realizations 0 .. realizations - 1, ordered by id."""
    ids = list(range(realizations))
    if workers > 1 and realizations > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            frames = list(executor.map(run_realization, [settings] * realizations, ids))
    else:
        frames = [run_realization(settings, i) for i in ids]

    for frame in frames:
        if len(frame) < 2:
            raise ValueError("need at least 2 recorded times, got {}".format(len(frame)))
    return frames


def average_series(frames, columns=AVERAGED_COLUMNS):
    """Arithmetic mean of the norm columns across realizations at each time."""
    stacked = pd.concat(frames, ignore_index=True)
    return stacked.groupby("t", sort=True)[list(columns)].mean().reset_index()


def mixing_experiment(nu, kappa, realizations=8, settings=None, window=None, workers=1):
    """Fit H^-1 decay per realization and of the realization average.

    Parameters
    ----------
    nu : float
        shift diffusivity
    kappa : float
        scalar diffusivity
    realizations : int, optional (default: 8)
    settings : dict, optional
        resolved settings (see cellmix.config); flow.nu and scalar.kappa are
        replaced by nu and kappa
    window : (t0, t1), optional
        fit window; defaults to the horizon minus its first 20%
    workers : int, optional (default: 1)
        processes used to run realizations

    Returns
    -------
    MixingResult
    """

    if realizations < 1:
        raise ValueError("need at least one realization, got {}".format(realizations))

    settings = dict(settings or resolve())
    settings["flow.nu"] = nu
    settings["scalar.kappa"] = kappa

    frames = run_realizations(settings, realizations, workers)
    fits = [
        fit_decay(frame, "h_minus1", window, series_id="realization-{}".format(i))
        for i, frame in enumerate(frames)
    ]

    averaged = average_series(frames)
    averaged_fit = fit_decay(averaged, "h_minus1", window, series_id="averaged")
    averaged_h2_fit = fit_decay(averaged, "h_minus2", window, series_id="averaged-h2")

    prefactors = pd.DataFrame(
        {
            "realization": range(realizations),
            "prefactor": [random_prefactor(frame, fit.rate) for frame, fit in zip(frames, fits)],
        }
    )
    prefactors.attrs["moments"] = prefactor_moments(prefactors["prefactor"])

    fits = fits_frame(fits)
    dispersion = float(fits["rate"].std(ddof=1)) if realizations > 1 else 0.0
    log.info(
        "Mixing nu={}, kappa={}: averaged rate {:.4f} (R^2 {:.3f}) over {:,} realizations".format(
            nu, kappa, averaged_fit.rate, averaged_fit.r_squared, realizations
        )
    )

    return MixingResult(
        fits=fits,
        averaged=averaged,
        averaged_fit=averaged_fit,
        averaged_h2_fit=averaged_h2_fit,
        dispersion=dispersion,
        prefactors=prefactors,
        series=pd.concat(frames, ignore_index=True),
    )


def windowed_rates(series, windows, column="h_minus1"):
    """Decay rate of one series on each window, e.g. to show a slowing steady flow."""
    return pd.DataFrame(
        [
            dict(t0=t0, t1=t1, rate=fit_decay(series, column, (t0, t1)).rate)
            for t0, t1 in windows
        ]
    )


def steady_control(settings=None, windows=((0.0, 15.0), (15.0, 30.0))):
    """Windowed rates of the steady cellular flow, which mixes sub-exponentially."""
    settings = dict(settings or resolve())
    settings["flow.kind"] = "steady_cellular"
    series = run_realization(settings, 0)
    rates = windowed_rates(series, windows)
    log.info(
        "Steady flow windowed rates: {}".format(
            ", ".join("{:.4f}".format(r) for r in rates["rate"])
        )
    )
    return rates


def relative_difference(a, b):
    return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny)
