"""Enhanced dissipation: L2 decay rate mu(kappa) across a diffusivity sweep."""

from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from cellmix.config import resolve
from cellmix.experiments.fitting import fit_decay, fits_frame
from cellmix.experiments.mixing import mixing_experiment, run_realizations


log = logging.getLogger(__name__)

# mu(kappa) is fitted on [0, WINDOW_FACTOR * log(1 / kappa) / lambda]
WINDOW_FACTOR = 0.8

SWEEP_COLUMNS = ["kappa", "mu", "mu_log", "realizations", "dispersion", "late_rate", "window_end"]


@dataclass
class SweepResult:
    """Per-kappa dissipation rates.

    Attributes
    ----------
    table : pandas.DataFrame
        kappa (strictly decreasing), mu, mu_log = mu * log(1 / kappa),
        realizations, dispersion, late_rate, window_end
    fits : pandas.DataFrame
        every per-realization fit, with a kappa column
    mixing_rate : float
        the kappa = 0 rate defining the fit windows
    """

    table: pd.DataFrame
    fits: pd.DataFrame
    mixing_rate: float

    def spread(self):
        """(max - min) / mean of mu * log(1 / kappa) across the sweep."""
        values = self.table["mu_log"]
        return float((values.max() - values.min()) / values.mean())


def check_kappas(kappas):
    kappas = [float(k) for k in kappas]
    for kappa in kappas:
        if not 0 < kappa < 1:
            raise ValueError("diffusivity must lie in (0, 1), got {}".format(kappa))
    if any(b >= a for a, b in zip(kappas, kappas[1:])):
        raise ValueError("diffusivities must be strictly decreasing, got {}".format(kappas))
    return kappas


def fit_window(kappa, mixing_rate, t_final):
    """End of the pre-uniform window, clipped to the horizon."""
    if mixing_rate <= 0:
        return t_final
    return min(WINDOW_FACTOR * np.log(1.0 / kappa) / mixing_rate, t_final)


def dissipation_sweep(kappas, nu=4.0, realizations=4, settings=None, mixing_rate=None, workers=1):
    """Fit mu(kappa) from L2 decay for each kappa.

    Parameters
    ----------
    kappas : sequence of float
        strictly decreasing, each in (0, 1)
    nu : float, optional (default: 4)
    realizations : int, optional (default: 4)
    settings : dict, optional
        resolved settings (see cellmix.config)
    mixing_rate : float, optional
        kappa = 0 mixing rate; measured with mixing_experiment when omitted
    workers : int, optional (default: 1)

    Returns
    -------
    SweepResult
    """

    kappas = check_kappas(kappas)
    settings = dict(settings or resolve())
    settings["flow.nu"] = nu
    t_final = settings["run.t_final"]

    if mixing_rate is None:
        mixing = mixing_experiment(nu, 0.0, realizations, settings, workers=workers)
        mixing_rate = mixing.averaged_fit.rate

    rows = []
    all_fits = []
    for kappa in kappas:
        settings["scalar.kappa"] = kappa
        frames = run_realizations(settings, realizations, workers)
        end = fit_window(kappa, mixing_rate, t_final)

        fits = [
            fit_decay(frame, "l2", (0.0, end), series_id="kappa-{}-{}".format(kappa, i))
            for i, frame in enumerate(frames)
        ]
        late = []
        for frame in frames:
            if (frame["t"] >= end).sum() >= 2 and end < t_final:
                late.append(fit_decay(frame, "l2", (end, t_final)).rate)
        mu = float(np.mean([fit.rate for fit in fits]))

        rows.append(
            {
                "kappa": kappa,
                "mu": mu,
                "mu_log": mu * np.log(1.0 / kappa),
                "realizations": realizations,
                "dispersion": float(np.std([fit.rate for fit in fits], ddof=1))
                if realizations > 1
                else 0.0,
                "late_rate": float(np.mean(late)) if late else np.nan,
                "window_end": end,
            }
        )
        frame = fits_frame(fits)
        frame["kappa"] = kappa
        all_fits.append(frame)
        log.info("kappa={:.1e}: mu={:.4e}, mu log(1/kappa)={:.4f}".format(kappa, mu, rows[-1]["mu_log"]))

    return SweepResult(
        table=pd.DataFrame(rows, columns=SWEEP_COLUMNS),
        fits=pd.concat(all_fits, ignore_index=True),
        mixing_rate=float(mixing_rate),
    )
