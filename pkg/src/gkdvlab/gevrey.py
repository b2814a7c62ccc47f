"""Gevrey norms, analyticity-radius estimates and windowed Bourgain-norm proxies."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.signal.windows import tukey

from . import _kernels
from .spectral import EXP_LIMIT, derivative_symbol, product4_coeffs

RADIUS_FLOOR = 1e-13
MIN_MODES = 8


class InsufficientBandError(ValueError):
    """Fewer than ``MIN_MODES`` usable modes in the fit band."""


@dataclass(frozen=True)
class GevreyParams:
    sigma: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def gevrey_norm(u, sigma=0.0, s=0.0):
    """``sqrt(L * sum_k exp(2 sigma|k|) <k>^(2s) |c_k|^2)``; equals ``||u||_L2`` at sigma=s=0."""
    u.grid.check_sigma(sigma)
    return _kernels.weighted_l2(u.grid.k, u.coeffs, sigma, s) * math.sqrt(u.grid.L)


def measure_A(traj, sigma, s=0.0):
    """``(times, A_sigma(t))`` for every snapshot of ``traj``."""
    traj.grid.check_sigma(sigma)
    values = _kernels.weighted_l2(traj.grid.k, traj.coeffs, sigma, s) * math.sqrt(traj.grid.L)
    return traj.times.copy(), values


# -- radius of analyticity --------------------------------------------------------


@dataclass(frozen=True)
class RadiusEstimate:
    sigma_hat: float
    band: tuple
    residual: float
    classification: str
    n_modes: int
    curvature: float = 0.0

    def as_dict(self):
        return {
            "sigma_hat": self.sigma_hat,
            "band": list(self.band),
            "residual": self.residual,
            "classification": self.classification,
            "n_modes": self.n_modes,
            "curvature": self.curvature,
        }


def default_band(grid):
    return (grid.k_max / 8.0, 0.75 * grid.k_max)


def estimate_radius(u, band=None, floor=RADIUS_FLOOR, curvature_tol=1.0, strict=True):
    """Fit ``log|c_k| ~ a - sigma_hat |k|`` over the band, above the noise floor.

    ``classification`` is ``"super-exponential"`` when a quadratic term bends
    the log-spectrum by more than ``curvature_tol`` nats (and 5% of its total
    drop) across the band, ``"at-noise-floor"`` when fewer than 8 modes remain
    or the spectrum grows, and ``"exponential"`` otherwise. With
    ``strict=False`` an unusable band yields ``sigma_hat = nan`` instead of
    raising :class:`InsufficientBandError`.
    """
    grid = u.grid
    lo, hi = default_band(grid) if band is None else band
    mag = np.abs(u.coeffs)
    top = mag.max()
    ak = grid.abs_k
    usable = (ak >= lo) & (ak <= hi) & (mag > floor * top) & (ak > 0)
    usable[grid.nyquist] = False
    n = int(np.count_nonzero(usable))
    if n < MIN_MODES or top == 0.0:
        if strict:
            raise InsufficientBandError(
                f"insufficient band: {n} usable modes in |k| in [{lo:.4g}, {hi:.4g}] (need {MIN_MODES})"
            )
        return RadiusEstimate(math.nan, (lo, hi), math.nan, "at-noise-floor", n)

    kk = ak[usable]
    y = np.log(mag[usable])
    A = np.column_stack([np.ones_like(kk), kk])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    rms = float(np.sqrt(np.mean(res**2)))
    sigma_hat = float(-coef[1])

    # concavity test: bulge of the quadratic fit above its chord at mid-band
    span = kk.max() - kk.min()
    curvature = 0.0
    if np.unique(kk).size >= 3 and span > 0:
        q = np.polyfit(kk, y, 2)[0]
        curvature = float(-q * span**2 / 4.0)
    drop = abs(sigma_hat) * span
    if sigma_hat < 0:
        cls = "at-noise-floor"
    elif curvature > curvature_tol and curvature > 0.05 * drop:
        cls = "super-exponential"
    else:
        cls = "exponential"
    return RadiusEstimate(sigma_hat, (float(lo), float(hi)), rms, cls, n, curvature)


# -- space-time (Bourgain) proxies ------------------------------------------------


@dataclass(frozen=True)
class BourgainParams:
    """Weights ``exp(sigma|k|) <k>^s <tau - k^3>^b`` and the time taper.

    ``taper_fraction`` is the Tukey shape parameter over the full segment:
    1.0 is the raised cosine (Hann), 0.0 a rectangular window.
    """

    sigma: float = 0.0
    s: float = 0.0
    b: float = 0.0
    taper: str = "raised-cosine"
    taper_fraction: float = 1.0
    pad_factor: int = 4

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.taper not in ("raised-cosine", "rectangular"):
            raise ValueError(f"unknown taper {self.taper!r}")
        if not 0.0 <= self.taper_fraction <= 1.0:
            raise ValueError("taper_fraction must lie in [0, 1]")
        if self.pad_factor < 1:
            raise ValueError("pad_factor must be >= 1")

    def window(self, M):
        if self.taper == "rectangular":
            return np.ones(M)
        return tukey(M, self.taper_fraction, sym=True)


@dataclass(frozen=True)
class SpaceTimeField:
    """Uniformly sampled segment of a trajectory: ``coeffs[j]`` at ``t0 + j*dt``."""

    grid: object
    t0: float
    dt: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[1] != self.grid.N:
            raise ValueError("coeffs must have shape (M, N)")
        if c.shape[0] < 16:
            raise ValueError(f"need at least 16 time samples, got {c.shape[0]}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "coeffs", c)

    @property
    def M(self):
        return self.coeffs.shape[0]

    @property
    def span(self):
        return self.dt * (self.M - 1)

    @classmethod
    def from_trajectory(cls, traj, t_start=0.0, t_end=None, rtol=1e-9):
        t = traj.times
        t_end = t[-1] if t_end is None else t_end
        sel = (t >= t_start - 1e-12) & (t <= t_end + 1e-12)
        ts = t[sel]
        if ts.size < 2:
            raise ValueError("segment holds fewer than two samples")
        steps = np.diff(ts)
        if np.max(np.abs(steps - steps.mean())) > rtol * steps.mean() + 1e-15:
            raise ValueError("trajectory sampling is not uniform on the segment")
        return cls(traj.grid, float(ts[0]), float(steps.mean()), traj.coeffs[sel])

    def map(self, func):
        """New field with ``func`` applied to the coefficient stack."""
        return SpaceTimeField(self.grid, self.t0, self.dt, func(self.coeffs))


def _modulation_spectrum(field, params):
    """|transform|^2 on the grid (lambda_m, k) where lambda = tau - k^3.

    Each spatial mode is demodulated by the free dispersion ``exp(-i k^3 t)``
    before the time transform, so ``lambda`` is read off directly and high
    wavenumbers do not alias in ``tau``.
    """
    g = field.grid
    M = field.M
    t = field.t0 + field.dt * np.arange(M)
    w = params.window(M)
    demod = np.exp(-1j * np.outer(t, g.k**3))
    P = params.pad_factor * M
    spec = sfft.fft(field.coeffs * demod * w[:, None], n=P, axis=0)
    lam = 2.0 * np.pi * sfft.fftfreq(P, field.dt)
    return lam, np.abs(spec) ** 2


def bourgain_norm(field, params):
    """Windowed proxy for ``||exp(sigma|D|) u||_{X^{s,b}}`` on the sampled segment.

    The taper extends the segment by zero outside ``[t0, t0+span]``; the result
    is the norm of that particular extension, hence an upper bound for the
    restriction norm up to the taper's effect. The discrete normalization is
    such that ``b = s = sigma = 0`` gives ``dt * L * sum_j w_j^2 sum_k |c_k(t_j)|^2``,
    the space-time L^2 norm of the tapered samples.
    """
    g = field.grid
    g.check_sigma(params.sigma)
    lam, power = _modulation_spectrum(field, params)
    bracket = np.sqrt(1.0 + lam**2)
    if params.b * math.log(bracket.max()) > EXP_LIMIT:
        raise OverflowError(f"weight <tau - k^3>^b overflows for b={params.b}")
    log_w = params.sigma * g.abs_k[None, :] + params.s * 0.5 * np.log1p(g.k**2)[None, :]
    log_w = log_w + params.b * np.log(bracket)[:, None]
    if not np.any(power):
        return 0.0
    # scale before exponentiating so large sigma*k does not overflow the square
    log_terms = 2.0 * log_w + np.log(np.where(power > 0, power, 1.0))
    log_terms = np.where(power > 0, log_terms, -np.inf)
    top = log_terms.max()
    total = np.exp(log_terms - top).sum()
    P = power.shape[0]
    return float(math.sqrt(field.dt * g.L / P * total) * math.exp(0.5 * top))


def _check_multilinear_exponents(s, b, b_prime):
    if not b > 0.5:
        raise ValueError(f"b must exceed 1/2, got {b}")
    if s >= 0:
        if not -0.5 < b_prime < -1.0 / 3.0:
            raise ValueError(f"for s >= 0 need -1/2 < b' < -1/3, got {b_prime}")
    elif s > -1.0 / 6.0:
        if not -0.5 < b_prime < s - 1.0 / 3.0:
            raise ValueError(f"for -1/6 < s < 0 need -1/2 < b' < s - 1/3, got {b_prime}")
    else:
        raise ValueError(f"s must exceed -1/6, got {s}")


def quartic_derivative_field(u1, u2, u3, u4):
    """Space-time field of ``d/dx (u1 u2 u3 u4)``, products taken alias-free per time slice."""
    for other in (u2, u3, u4):
        if other.grid != u1.grid or other.coeffs.shape != u1.coeffs.shape or other.dt != u1.dt:
            raise ValueError("multilinear probe needs fields on one space-time grid")
    dx = derivative_symbol(u1.grid, 1)
    prod = product4_coeffs(u1.coeffs, u2.coeffs, u3.coeffs, u4.coeffs)
    return SpaceTimeField(u1.grid, u1.t0, u1.dt, prod * dx[None, :])


def probe_multilinear(fields, s=0.0, b=0.6, b_prime=-0.4, sigma=0.0, taper_fraction=1.0):
    """``||d_x(u1 u2 u3 u4)||_{X^{sigma,s,b'}} / prod_j ||u_j||_{X^{sigma,s,b}}`` on proxy norms.

    A zero numerator gives 0 even if a factor vanishes; a positive numerator
    over a zero denominator raises ``ZeroDivisionError``.
    """
    if len(fields) != 4:
        raise ValueError("need exactly four space-time fields")
    _check_multilinear_exponents(s, b, b_prime)
    lhs_params = BourgainParams(sigma=sigma, s=s, b=b_prime, taper_fraction=taper_fraction)
    rhs_params = BourgainParams(sigma=sigma, s=s, b=b, taper_fraction=taper_fraction)
    lhs = bourgain_norm(quartic_derivative_field(*fields), lhs_params)
    if lhs == 0.0:
        return 0.0
    rhs = 1.0
    for f in fields:
        rhs *= bourgain_norm(f, rhs_params)
    if rhs == 0.0:
        raise ZeroDivisionError("degenerate probe: product of input norms is zero")
    return lhs / rhs
