"""Flat key = value run configuration.

Files hold dotted keys without sections, e.g.

    grid.n = 256
    flow.kind = random_cellular  # comment

Values are coerced by the type in DEFAULTS; command line flags override file
values, which override the defaults.
"""

import configparser
import logging
from pathlib import Path

from cellmix.errors import ConfigError


log = logging.getLogger(__name__)

# key: (type, default)
DEFAULTS = {
    "grid.n": (int, 256),
    "run.t_final": (float, 30.0),
    "run.dt": (float, 1e-3),
    "run.record_every": (int, 100),
    "run.realizations": (int, 8),
    "run.seed": (int, 0),
    "scalar.kappa": (float, 0.0),
    "scalar.theta0": (str, "sine"),
    "scalar.kmax": (int, 4),
    "flow.kind": (str, "random_cellular"),
    "flow.nu": (float, 4.0),
    "flow.seed": (int, 0),
    "flow.y0": (str, "origin"),
    "twopoint.n": (int, 12),
    "twopoint.preset": (str, "moderate"),
    "lagrangian.particles": (int, 10000),
}

CHOICES = {
    "scalar.theta0": ("sine", "disk", "random_bandlimited", "stream"),
    "flow.kind": ("steady_cellular", "random_cellular", "tilted_cellular", "none"),
    "flow.y0": ("origin", "uniform"),
    "twopoint.preset": ("moderate", "published", "paper"),
}

SECTION = "cellmix"


def defaults():
    return {key: value for key, (_, value) in DEFAULTS.items()}


def coerce(key, value):
    """Convert a raw value to the declared type of key."""
    if key not in DEFAULTS:
        raise ConfigError("unknown configuration key {!r}".format(key))

    kind = DEFAULTS[key][0]
    try:
        # "1e3" is a valid int setting
        converted = int(float(value)) if kind is int and isinstance(value, str) else kind(value)
    except (TypeError, ValueError):
        raise ConfigError("{} expects {}, got {!r}".format(key, kind.__name__, value))

    if key in CHOICES and converted not in CHOICES[key]:
        raise ConfigError("{} must be one of {}, got {!r}".format(key, CHOICES[key], converted))
    return converted


def parse_config(text):
    """Parse flat key = value text into a dict of coerced values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string("[{}]\n{}".format(SECTION, text))
    except configparser.Error as e:
        raise ConfigError("malformed configuration: {}".format(e))
    return {key: coerce(key, value) for key, value in parser.items(SECTION)}


def read_config(path):
    path = Path(path)
    values = parse_config(path.read_text(encoding="utf-8"))
    log.info("Read {:,} settings from {}".format(len(values), path))
    return values


def resolve(path=None, overrides=None):
    """Defaults, then the config file, then explicit overrides (None skipped)."""
    settings = defaults()
    if path is not None:
        settings.update(read_config(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            settings[key] = coerce(key, value)
    return settings
