"""Initial data families."""

import numpy as np

from .spectral import SpectralField

FAMILIES = ("sech", "gaussian", "cosine", "soliton", "zero", "file")


def soliton_profile(x, c, x0=0.0):
    """Traveling wave of speed ``c``: ``(5c/2 sech^2(3 sqrt(c) (x-x0)/2))^(1/3)``.

    Solves ``-c phi + phi'' + phi^4 = 0`` with decay at infinity.
    """
    if c <= 0:
        raise ValueError(f"soliton speed must be positive, got {c}")
    arg = 1.5 * np.sqrt(c) * (np.asarray(x, dtype=float) - x0)
    return np.cbrt(2.5 * c) / np.cosh(arg) ** (2.0 / 3.0)


def periodic_distance(x, x0, L):
    """Signed distance ``x - x0`` wrapped to ``[-L/2, L/2)``."""
    return (np.asarray(x) - x0 + 0.5 * L) % L - 0.5 * L


def make_datum(grid, family, amplitude=1.0, width=1.0, center=None, mode=1, c=1.0):
    """Samples of a named datum, centered at ``center`` (default ``L/2``)."""
    x0 = 0.5 * grid.L if center is None else center
    d = periodic_distance(grid.x, x0, grid.L)
    if family == "sech":
        u = amplitude / np.cosh(d / width)
    elif family == "gaussian":
        u = amplitude * np.exp(-((d / width) ** 2))
    elif family == "cosine":
        # a single mode: set it exactly so no transform round-off leaks into high k
        if not 0 < mode < grid.N // 2:
            raise ValueError(f"cosine mode must lie in 1..{grid.N // 2 - 1}, got {mode}")
        c = np.zeros(grid.N, dtype=complex)
        c[mode] = c[-mode] = 0.5 * amplitude
        return SpectralField(grid, c)
    elif family == "soliton":
        u = soliton_profile(d, c)
    elif family == "zero":
        u = np.zeros(grid.N)
    else:
        raise ValueError(f"unknown datum family {family!r}; choose from {FAMILIES}")
    return SpectralField.from_samples(grid, u)
