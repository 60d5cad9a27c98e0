"""Exceptions and warnings raised by cellmix."""


class UnsupportedGridError(ValueError):
    """Grid size is not supported by the requested transform or integrator."""


class NonZeroMeanError(ValueError):
    """Field has a mean above tolerance where a mean-zero field is required."""


class InvalidDensityError(ValueError):
    """Shift density is negative or does not have unit mass."""


class NumericalBlowupError(FloatingPointError):
    """A time step produced NaN or Inf values."""


class InfeasibleSystemError(ArithmeticError):
    """Exact linear program has no feasible point."""


class ConfigError(KeyError):
    """Unknown or malformed configuration key."""


class CFLWarning(UserWarning):
    """Time step exceeds the advective CFL bound."""
