"""Run directory outputs: meta.json and CSV tables."""

import json
import logging
from pathlib import Path
import subprocess

import numpy as np
import scipy

from cellmix import __version__


log = logging.getLogger(__name__)


def git_describe(cwd=None):
    """`git describe --always --dirty`, or "unknown" outside a checkout."""
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=cwd,
            capture_output=True,
            text=True,
            timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return result.stdout.strip() if result.returncode == 0 and result.stdout.strip() else "unknown"


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (tuple, set)):
        return list(value)
    return str(value)


def write_meta(out_dir, settings, seeds, threads=1, command=None):
    """Write meta.json describing one run.

    Parameters
    ----------
    out_dir : str or Path
        created if missing
    settings : dict
        resolved configuration
    seeds : dict
        named seeds used by the run
    threads : int, optional (default: 1)
    command : str, optional
        CLI subcommand

    Returns
    -------
    Path
        path of meta.json
    """

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "command": command,
        "config": settings,
        "seeds": seeds,
        "threads": threads,
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "git": git_describe(),
    }
    path = out_dir / "meta.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable), encoding="utf-8")
    return path


def write_table(df, out_dir, name):
    """DataFrame to out_dir/name.csv without the index."""
    path = Path(out_dir) / "{}.csv".format(name)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False)
    log.info("Wrote {:,} rows to {}".format(len(df), path))
    return path
