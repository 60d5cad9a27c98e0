"""Command line entry point: `cellmix <subcommand> [options]`."""

import argparse
import json
import logging
from pathlib import Path
import sys

import numpy as np
import pandas as pd
from scipy import fft

from cellmix import log as cellmix_log
from cellmix.config import resolve
from cellmix.experiments.correlations import correlation_decay_experiment
from cellmix.experiments.dissipation import dissipation_sweep
from cellmix.experiments.fitting import fit_decay
from cellmix.experiments.mixing import run_realization, run_realizations
from cellmix.experiments.spectrum import Forcing, batchelor_spectrum
from cellmix.runs import write_meta, write_table
from cellmix.scalar.initial import THETA0_KINDS, make_theta0
from cellmix.scalar.solver import SimulationConfig, solve
from cellmix.spectral.snapshots import write_snapshot
from cellmix.twopoint.functionals import PRESETS, preset
from cellmix.twopoint.integrator import two_point_solve
from cellmix.twopoint.state import build_initial
from cellmix.verify.exponents import (
    OBJECTIVES,
    PUBLISHED_ASSIGNMENT,
    check_exponent_system,
    minimize_exponents,
)
from cellmix.verify.hardy import hardy_poincare_1d, hardy_poincare_2d, telescoping_poincare
from cellmix.verify.identities import run_identity_suite
from cellmix.verify.ratios import phi_h1_ratio_bracket, psi_controls_phi_ratio, random_samples


log = logging.getLogger("cellmix.cli")

SUITES = ("identities", "hardy", "ratios", "coeffs")


def _json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, default=str)


def _seed(args):
    return 0 if args.seed is None else args.seed


def _settings(args, **overrides):
    overrides.update({"run.seed": args.seed, "flow.seed": args.seed})
    return resolve(args.config, overrides)


### subcommands


def simulate(args):
    settings = _settings(
        args,
        **{
            "grid.n": args.n,
            "scalar.kappa": args.kappa,
            "flow.nu": args.nu,
            "flow.kind": args.flow,
            "run.t_final": args.t_final,
            "run.dt": args.dt,
            "run.realizations": args.realizations,
        }
    )

    if args.snapshots:
        snapshot_dir = Path(args.out) / "snapshots"
        snapshot_dir.mkdir(parents=True, exist_ok=True)

        def on_record(t, theta):
            write_snapshot(snapshot_dir / "theta_{:010.4f}.mxc".format(t), theta.to_grid())

        frames = [solve(SimulationConfig.from_settings(settings, 0), on_record=on_record)]
        frames += [run_realization(settings, i) for i in range(1, settings["run.realizations"])]
    else:
        frames = run_realizations(settings, settings["run.realizations"], args.workers)

    write_table(pd.concat(frames, ignore_index=True), args.out, "norms")
    return settings, {"run": settings["run.seed"], "flow": settings["flow.seed"]}, 0


def two_point(args):
    settings = _settings(args, **{"twopoint.n": args.n, "twopoint.preset": args.preset})
    n = settings["twopoint.n"]
    coeffs = preset(settings["twopoint.preset"], nu=args.nu)
    theta0 = make_theta0(args.theta0, 32, seed=settings["run.seed"])
    state = build_initial(theta0, n=n, kappa=args.kappa, nu=args.nu)

    on_record = None
    if args.snapshots:
        snapshot_dir = Path(args.out) / "snapshots"
        snapshot_dir.mkdir(parents=True, exist_ok=True)

        def on_record(state):
            write_snapshot(snapshot_dir / "f_{:010.4f}.mxc".format(state.time), state.values)

    series = two_point_solve(
        state, coeffs, args.dt, args.t_final, record_every=args.record_every, on_record=on_record
    )
    write_table(series, args.out, "twopoint")
    return settings, {"run": settings["run.seed"]}, 0


def correlate(args):
    settings = _settings(args)
    seed = settings["run.seed"]
    h = make_theta0(args.h, args.grid, seed=seed, index=0)
    g = make_theta0(args.g, args.grid, seed=seed, index=1)
    result = correlation_decay_experiment(
        h,
        g,
        args.nu,
        args.t_max,
        realizations=args.realizations,
        kappa=args.kappa,
        m=args.per_node,
        seed=seed,
        dt=args.dt,
    )
    table = result.table.rename(columns={"t": "n"})[["n", "realization", "correlation"]]
    table["n"] = table["n"].astype(int)
    write_table(table, args.out, "correlations")
    write_table(result.fits, args.out, "correlation_fits")
    print(_json({"gamma": result.gamma, "exceedance": result.exceedance}))
    return settings, {"run": seed, "particles": seed}, 0


def verify_identities(args):
    report = run_identity_suite(random_samples(args.samples, n=args.n, seed=_seed(args)))
    return {"identities": report.to_dict("records")}, bool(report["passed"].all())


def verify_hardy(args):
    coarse = hardy_poincare_1d(128)
    fine = hardy_poincare_1d(256)
    coarse_n, fine_n = args.floor_grids
    coarse_2d = hardy_poincare_2d(coarse_n, samples=args.samples, seed=_seed(args))
    fine_2d = hardy_poincare_2d(fine_n, samples=args.samples, seed=_seed(args))
    telescoping = telescoping_poincare(seed=_seed(args))

    refinement = abs(fine.constant - coarse.constant) / fine.constant
    floor_change = abs(fine_2d["floor"] - coarse_2d["floor"]) / fine_2d["floor"]
    report = {
        "unweighted_2pi": fine.unweighted_2pi,
        "unweighted_pi": fine.unweighted_pi,
        "weighted_constant": fine.constant,
        "weighted_refinement": refinement,
        "weighted_flagged": fine.flagged,
        "floor_2d": fine_2d["floor"],
        "floor_2d_refinement": floor_change,
        "min_quotient_2d": fine_2d["min_quotient"],
        "telescoping_max": float(telescoping.max()),
    }
    passed = (
        abs(fine.unweighted_2pi - 1.0) < 1e-6
        and refinement < 0.05
        and not fine.flagged
        and fine_2d["floor"] > 0
        and floor_change < 0.1
    )
    return report, passed


def verify_ratios(args):
    coeffs = preset("moderate")
    states = random_samples(args.samples, n=8, seed=_seed(args))
    low, high = phi_h1_ratio_bracket(states, coeffs)
    ratios = psi_controls_phi_ratio(states, coeffs)
    report = {
        "phi_h1_bracket": [low, high],
        "phi_psi_max": ratios.max_ratio,
        "violations": ratios.violations,
    }
    passed = 0 < low <= high < np.inf and np.isfinite(ratios.max_ratio) and not ratios.violations
    return report, bool(passed)


def verify_coeffs(args):
    check = check_exponent_system(PUBLISHED_ASSIGNMENT)
    optimized = minimize_exponents("max")
    report = {
        "passed": check.passed,
        "violations": check.violations,
        "tight": check.tight,
        "margins": check.margins.to_dict("records"),
        "optimized": optimized.as_dict(),
        "optimized_max": optimized.max_exponent,
    }
    return report, check.passed


VERIFIERS = {
    "identities": verify_identities,
    "hardy": verify_hardy,
    "ratios": verify_ratios,
    "coeffs": verify_coeffs,
}


def verify(args):
    report, passed = VERIFIERS[args.suite](args)
    report["suite"] = args.suite
    report["passed"] = passed
    text = _json(report)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify-{}.json".format(args.suite)).write_text(text, encoding="utf-8")
    print(text)
    return {"suite": args.suite}, {"samples": _seed(args)}, 0 if passed else 1


def coeffs(args):
    fixed = {}
    for item in args.fix or []:
        key, _, value = item.partition("=")
        fixed[key.strip()] = int(value)
    assignment = minimize_exponents(args.minimize, fixed or None)
    check = check_exponent_system(assignment)
    print(
        _json(
            {
                "objective": args.minimize,
                "assignment": assignment.as_dict(),
                "max": assignment.max_exponent,
                "sum": assignment.total,
                "tight": check.tight,
            }
        )
    )
    return {"objective": args.minimize, "fixed": fixed}, {}, 0


def sweep_kappa(args):
    settings = _settings(args, **{"grid.n": args.n, "run.t_final": args.t_final})
    result = dissipation_sweep(
        args.kappas,
        nu=args.nu,
        realizations=args.realizations,
        settings=settings,
        mixing_rate=args.mixing_rate,
        workers=args.workers,
    )
    write_table(result.table, args.out, "sweep")
    write_table(result.fits, args.out, "sweep_fits")
    print(_json({"mixing_rate": result.mixing_rate, "spread": result.spread()}))
    return settings, {"run": settings["run.seed"], "flow": settings["flow.seed"]}, 0


def fit(args):
    series = pd.read_csv(args.input)
    window = None if args.t0 is None else (args.t0, args.t1 if args.t1 is not None else np.inf)
    if "realization" in series.columns and args.realization is not None:
        series = series.loc[series["realization"] == args.realization]
    result = fit_decay(series, args.column, window, series_id=Path(args.input).stem)
    write_table(pd.DataFrame([result.to_dict()]), args.out, "fit")
    print(_json(result.to_dict()))
    return {"input": str(args.input), "column": args.column}, {}, 0


def spectrum(args):
    settings = _settings(args)
    result = batchelor_spectrum(
        Forcing(args.kmin, args.kmax, args.amplitude),
        args.kappa,
        args.t_final,
        n=args.n,
        dt=args.dt,
        nu=args.nu,
        seed=settings["run.seed"],
        width=args.width,
    )
    write_table(result.spectrum, args.out, "spectrum")
    print(_json({"slope": result.slope, "fit_range": result.fit_range, "samples": result.samples}))
    return settings, {"forcing": settings["run.seed"]}, 0


### parser


def build_parser():
    parser = argparse.ArgumentParser(prog="cellmix", description="Random cellular flow mixing lab")
    parser.add_argument("--config", default=None, help="flat key = value config file")
    parser.add_argument("--out", default="out", help="run directory")
    parser.add_argument("--seed", type=int, default=None, help="base seed")
    parser.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="scalar runs and their norm series")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--flow", default=None)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--workers", type=int, default=1, help="processes for realizations")
    p.add_argument("--snapshots", action="store_true", help="write MXC1 snapshots")
    p.set_defaults(func=simulate)

    p = sub.add_parser("two-point", help="integrate the two-point equation")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--nu", type=float, default=4.0)
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--preset", choices=PRESETS, default=None)
    p.add_argument("--t-final", type=float, default=5.0)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--theta0", choices=THETA0_KINDS, default="sine")
    p.add_argument("--record-every", type=int, default=10)
    p.add_argument("--snapshots", action="store_true")
    p.set_defaults(func=two_point)

    p = sub.add_parser("correlate", help="Lagrangian correlations at integer times")
    p.add_argument("--h", choices=THETA0_KINDS, default="sine")
    p.add_argument("--g", choices=THETA0_KINDS, default="sine")
    p.add_argument("--nu", type=float, default=4.0)
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--t-max", type=int, default=10)
    p.add_argument("--realizations", type=int, default=8)
    p.add_argument("--grid", type=int, default=32, help="grid of g's particle nodes")
    p.add_argument("--per-node", type=int, default=1)
    p.add_argument("--dt", type=float, default=1e-2)
    p.set_defaults(func=correlate)

    p = sub.add_parser("verify", help="verification suites with a JSON report")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--n", type=int, default=12, help="lattice of the identity suite")
    p.add_argument(
        "--floor-grids",
        type=int,
        nargs=2,
        default=[128, 256],
        metavar=("COARSE", "FINE"),
        help="grids of the 2D Hardy floor refinement",
    )
    p.set_defaults(func=verify)

    p = sub.add_parser("coeffs", help="optimize the coefficient exponents")
    p.add_argument("--minimize", choices=OBJECTIVES, default="max")
    p.add_argument("--fix", action="append", help="exponent=value, repeatable")
    p.set_defaults(func=coeffs)

    p = sub.add_parser("sweep-kappa", help="enhanced dissipation sweep")
    p.add_argument("--kappas", type=float, nargs="+", default=[1e-3, 3e-4, 1e-4])
    p.add_argument("--nu", type=float, default=4.0)
    p.add_argument("--realizations", type=int, default=4)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--mixing-rate", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=sweep_kappa)

    p = sub.add_parser("fit", help="fit a decay rate to a norm CSV")
    p.add_argument("input")
    p.add_argument("--column", default="h_minus1")
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--t1", type=float, default=None)
    p.add_argument("--realization", type=int, default=None)
    p.set_defaults(func=fit)

    p = sub.add_parser("spectrum", help="forced scalar spectrum")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--kappa", type=float, default=1e-3)
    p.add_argument("--nu", type=float, default=4.0)
    p.add_argument("--t-final", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--kmin", type=float, default=1.0)
    p.add_argument("--kmax", type=float, default=2.0)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.set_defaults(func=spectrum)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    cellmix_log.configure(args.verbose)

    with fft.set_workers(args.threads):
        settings, seeds, code = args.func(args)

    write_meta(args.out, settings, seeds, threads=args.threads, command=args.command)
    log.info("Finished {} in {}".format(args.command, args.out))
    return code


if __name__ == "__main__":
    sys.exit(main())
