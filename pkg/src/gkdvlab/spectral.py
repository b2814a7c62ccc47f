"""Periodic grid, Fourier transforms and spectral multipliers.

Coefficients are Fourier-series coefficients::

    c_k = (1/N) sum_j u(x_j) exp(-i k x_j),    u(x) = sum_k c_k exp(i k x)

stored in numpy FFT order, with the unpaired Nyquist mode taken as the
*positive* wavenumber ``+N/2 * 2*pi/L``. With this normalization
``integral |u|^2 dx = L * sum |c_k|^2``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

#: largest admissible exponent in ``exp(sigma*|k|)``
EXP_LIMIT = 700.0

#: padding factor for the quartic product (exact for anything > 5/2)
PAD_FACTOR = 3


class OverflowGuardError(ValueError):
    """``sigma * k_max`` exceeds the double-precision exponent range."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``N`` points on ``[0, L)``."""

    N: int
    L: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 8 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 8, got {self.N!r}")
        if not (self.L > 0 and np.isfinite(self.L)):
            raise ValueError(f"L must be positive and finite, got {self.L!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self):
        return self.L / self.N

    @property
    def dk(self):
        return 2.0 * np.pi / self.L

    @property
    def nyquist(self):
        """Index of the unpaired Nyquist mode."""
        return self.N // 2

    @property
    def k_max(self):
        return self.dk * (self.N // 2)

    @cached_property
    def x(self):
        x = np.arange(self.N) * self.dx
        x.setflags(write=False)
        return x

    @cached_property
    def k(self):
        m = np.fft.fftfreq(self.N, 1.0 / self.N)
        m[self.N // 2] = self.N // 2
        k = self.dk * m
        k.setflags(write=False)
        return k

    @cached_property
    def abs_k(self):
        a = np.abs(self.k)
        a.setflags(write=False)
        return a

    def check_sigma(self, sigma):
        """Raise :class:`OverflowGuardError` unless ``exp(sigma*k_max)`` is representable."""
        if sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        if sigma * self.k_max > EXP_LIMIT:
            raise OverflowGuardError(
                f"sigma={sigma:g} gives sigma*k_max={sigma * self.k_max:.4g} > {EXP_LIMIT:g}; "
                f"largest admissible sigma on this grid is {EXP_LIMIT / self.k_max:.6g}"
            )


def make_grid(N, L):
    return Grid(N, L)


@dataclass(frozen=True)
class RealField:
    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a real periodic field (numpy FFT order)."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} coefficients, got shape {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_samples(cls, grid, samples):
        return forward(RealField(grid, samples))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.N, dtype=complex))

    def to_samples(self):
        return inverse(self).samples

    def l2(self):
        """L^2 norm over one period."""
        return float(np.sqrt(self.grid.L * np.sum(self.coeffs.real**2 + self.coeffs.imag**2)))

    def with_coeffs(self, coeffs):
        return SpectralField(self.grid, coeffs)

    def __add__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


def _same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


def mirror(c):
    """Coefficient array reindexed as ``c[-k]`` (Nyquist maps to itself)."""
    return np.roll(c[::-1], 1)


def hermitian_defect(c):
    """Relative size of ``c[-k] - conj(c[k])``; zero for a real field."""
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(mirror(c) - np.conj(c))) / scale)


def is_hermitian(field, rtol=1e-12):
    return hermitian_defect(field.coeffs) <= rtol


def forward(field):
    samples = field.samples if isinstance(field, RealField) else np.asarray(field, dtype=float)
    grid = field.grid
    return SpectralField(grid, sfft.fft(samples) / grid.N)


def inverse(field):
    grid = field.grid
    return RealField(grid, np.real(sfft.ifft(field.coeffs)) * grid.N)


def exp_multiplier(field, sigma):
    """Apply ``exp(sigma*|D_x|)``. The multiplier is even, so realness is kept."""
    field.grid.check_sigma(sigma)
    if sigma == 0:
        return field
    return SpectralField(field.grid, field.coeffs * np.exp(sigma * field.grid.abs_k))


def derivative_symbol(grid, order):
    sym = (1j * grid.k) ** order
    if order % 2:
        sym[grid.nyquist] = 0.0
    return sym


def derivative(field, order=1):
    if int(order) != order or order < 1:
        raise ValueError(f"order must be a positive integer, got {order!r}")
    return SpectralField(field.grid, field.coeffs * derivative_symbol(field.grid, int(order)))


# -- dealiased products -----------------------------------------------------


def _pad_half(c, M):
    """Nonnegative half-spectrum of ``c`` zero-padded for an ``M``-point rfft grid.

    The Nyquist coefficient is split evenly between +N/2 and -N/2 so the padded
    field is the real trigonometric interpolant of the samples.
    """
    N = c.shape[-1]
    h = N // 2
    out = np.zeros(c.shape[:-1] + (M // 2 + 1,), dtype=complex)
    out[..., :h] = c[..., :h]
    out[..., h] = 0.5 * c[..., h]
    return out


def _truncate_half(half, N):
    """Full N-mode coefficient array from a padded half spectrum; Nyquist zeroed."""
    h = N // 2
    out = np.zeros(half.shape[:-1] + (N,), dtype=complex)
    out[..., :h] = half[..., :h]
    out[..., h + 1 :] = np.conj(half[..., h - 1 : 0 : -1])
    return out


def padded_samples(c, factor=PAD_FACTOR):
    """Physical samples of the trig interpolant on a ``factor*N`` grid (last axis)."""
    N = c.shape[-1]
    M = factor * N
    return sfft.irfft(_pad_half(c, M), n=M, axis=-1) * M


def from_padded_samples(values, N):
    M = values.shape[-1]
    return _truncate_half(sfft.rfft(values, axis=-1) / M, N)


def power4_coeffs(c):
    """Alias-free coefficients of ``u**4`` for ``|k| < N/2`` (Nyquist zeroed).

    Works on the last axis, so a stack of snapshots can be processed at once.
    """
    u = padded_samples(c)
    u2 = u * u
    return from_padded_samples(u2 * u2, c.shape[-1])


def product4_coeffs(c1, c2, c3, c4):
    """Alias-free coefficients of ``u1*u2*u3*u4`` for ``|k| < N/2``."""
    N = c1.shape[-1]
    p = padded_samples(c1) * padded_samples(c2) * padded_samples(c3) * padded_samples(c4)
    return from_padded_samples(p, N)


def nonlinear_power4(field):
    return SpectralField(field.grid, power4_coeffs(field.coeffs))


def integral_power5(field):
    """``integral u**5 dx`` without aliasing error."""
    u = padded_samples(field.coeffs)
    return float(field.grid.L * np.mean(u**5))
