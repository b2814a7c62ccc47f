"""Integrating-factor RK4 for ``u_t + u_xxx + (u^4)_x = 0`` on a periodic grid.

The stepper works on coefficient arrays. With ``E(t) = exp(i k^3 t)`` (the
exact linear flow) the scheme is classical RK4 applied to ``v = E(-t) u``.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    SpectralField,
    derivative_symbol,
    integral_power5,
    power4_coeffs,
)

log = logging.getLogger(__name__)

#: relative L^2 drift that aborts a run
L2_DRIFT_LIMIT = 1e-4


class SolverAbort(RuntimeError):
    """Non-finite state or runaway L^2 drift during time stepping."""


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    T: float
    sample_stride: int = 1
    nonlinearity_enabled: bool = True
    dealias: bool = True
    #: safety number in dt <= cfl / (4 ||u0||_inf^3 k_max); None disables the cap
    cfl: float | None = 0.5

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ValueError(f"sample_stride must be an integer >= 1, got {self.sample_stride}")


@dataclass(frozen=True)
class Trajectory:
    """Spectral snapshots ``coeffs[i]`` at ``times[i]``, all on ``grid``.

    ``nonlinear`` records which flow produced the snapshots so invariants and
    energy identities use the matching equation.
    """

    grid: object
    times: np.ndarray
    coeffs: np.ndarray
    dt: float = float("nan")
    nonlinear: bool = True

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        c = np.asarray(self.coeffs, dtype=complex)
        if t.ndim != 1 or c.shape != (t.size, self.grid.N):
            raise ValueError("times/coeffs shape mismatch")
        if t.size == 0:
            raise ValueError("empty trajectory")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return self.times.size

    def __getitem__(self, i):
        return SpectralField(self.grid, self.coeffs[i])

    @property
    def final(self):
        return self[-1]

    def until(self, t_end, tol=1e-12):
        """Sub-trajectory with ``times <= t_end``."""
        keep = self.times <= t_end + tol * max(1.0, abs(t_end))
        return Trajectory(self.grid, self.times[keep], self.coeffs[keep], self.dt, self.nonlinear)


@dataclass(frozen=True)
class EnergyReport:
    times: np.ndarray
    mass: np.ndarray
    l2: np.ndarray
    hamiltonian: np.ndarray

    def drift(self, name):
        """Max relative deviation of an invariant from its initial value."""
        v = getattr(self, name)
        scale = abs(v[0]) if v[0] != 0 else max(np.max(np.abs(v)), 1.0)
        return float(np.max(np.abs(v - v[0])) / scale)


# -- building blocks ------------------------------------------------------------


def linear_symbol(grid, t):
    """Fourier symbol ``exp(i t k^3)`` of the linear group; Nyquist zeroed."""
    e = np.exp(1j * t * grid.k**3)
    e[grid.nyquist] = 0.0
    return e


def propagator(u, t):
    return SpectralField(u.grid, u.coeffs * linear_symbol(u.grid, t))


def _aliased_power4(c):
    N = c.shape[-1]
    u = np.real(np.fft.ifft(c)) * N
    return np.fft.fft(u**4) / N


class _Rhs:
    def __init__(self, grid, dealias=True):
        self.dx = derivative_symbol(grid, 1)
        self.power = power4_coeffs if dealias else _aliased_power4

    def __call__(self, c):
        return -self.dx * self.power(c)


def rhs_nonlinear(u, dealias=True):
    """``-d/dx (u^4)`` in coefficient space."""
    return SpectralField(u.grid, _Rhs(u.grid, dealias)(u.coeffs))


class IFRK4:
    """Fixed-step integrating-factor RK4 stepper on coefficient arrays."""

    def __init__(self, grid, dt, nonlinear=True, dealias=True):
        self.grid = grid
        self.dt = float(dt)
        self.nonlinear = nonlinear
        self.E = linear_symbol(grid, self.dt)
        self.E2 = linear_symbol(grid, 0.5 * self.dt)
        self.rhs = _Rhs(grid, dealias)

    def __call__(self, c):
        if not self.nonlinear:
            return self.E * c
        dt, E, E2, f = self.dt, self.E, self.E2, self.rhs
        a = f(c)
        Ec = E2 * c
        b = f(Ec + 0.5 * dt * E2 * a)
        cc = f(Ec + 0.5 * dt * b)
        d = f(E * c + dt * E2 * cc)
        return E * c + (dt / 6.0) * (E * a + 2.0 * E2 * (b + cc) + d)


def step(u, dt, nonlinear=True, dealias=True):
    return SpectralField(u.grid, IFRK4(u.grid, dt, nonlinear, dealias)(u.coeffs))


def stable_dt(u, cfl=0.5):
    """Largest dt allowed by the advection bound ``cfl / (4 ||u||_inf^3 k_max)``."""
    umax = float(np.max(np.abs(u.to_samples())))
    if umax == 0.0:
        return math.inf
    return cfl / (4.0 * umax**3 * u.grid.k_max)


def evolve(u0, config, callback=None):
    """Integrate from ``u0`` to ``config.T`` and return the sampled trajectory.

    The step is the requested ``dt``, reduced if the advection bound demands
    it, then shrunk so an integer number of steps lands exactly on ``T``.
    ``callback(t, coeffs)``, if given, sees every step (including t=0)
    regardless of ``sample_stride``; it must not modify ``coeffs``.
    """
    grid = u0.grid
    dt = config.dt
    if config.nonlinearity_enabled and config.cfl is not None:
        cap = stable_dt(u0, config.cfl)
        if cap < dt:
            log.info("dt %.3g reduced to %.3g by the advection bound", dt, cap)
            dt = cap
    nsteps = max(1, math.ceil(config.T / dt - 1e-9))
    dt = config.T / nsteps
    stepper = IFRK4(grid, dt, config.nonlinearity_enabled, config.dealias)

    c = np.array(u0.coeffs, dtype=complex)
    c[grid.nyquist] = 0.0  # the dispersive flow cannot carry an unpaired real mode
    l2_0 = np.sqrt(np.sum(np.abs(c) ** 2))
    times = [0.0]
    snaps = [c.copy()]
    if callback is not None:
        callback(0.0, c)
    for n in range(1, nsteps + 1):
        c = stepper(c)
        if callback is not None:
            callback(n * dt, c)
        if n % config.sample_stride == 0 or n == nsteps:
            if not np.all(np.isfinite(c)):
                raise SolverAbort(f"non-finite coefficients at t={n * dt:.6g} (step {n})")
            l2 = np.sqrt(np.sum(np.abs(c) ** 2))
            if l2_0 > 0 and abs(l2 - l2_0) > L2_DRIFT_LIMIT * l2_0:
                raise SolverAbort(
                    f"L2 drift {abs(l2 - l2_0) / l2_0:.3g} exceeds {L2_DRIFT_LIMIT:g} "
                    f"at t={n * dt:.6g}; reduce dt or increase N"
                )
            times.append(n * dt)
            snaps.append(c.copy())
    return Trajectory(grid, np.array(times), np.array(snaps), dt, config.nonlinearity_enabled)


# -- invariants -----------------------------------------------------------------


def invariants(u, nonlinear=True):
    """(mass, l2, hamiltonian) of a single field; the linear flow's Hamiltonian drops the u^5 term."""
    g = u.grid
    c = u.coeffs
    mass = g.L * float(np.real(c[0]))
    l2 = float(np.sqrt(g.L * np.sum(np.abs(c) ** 2)))
    kinetic = 0.5 * g.L * float(np.sum(g.k**2 * np.abs(c) ** 2))
    if not nonlinear:
        return mass, l2, kinetic
    return mass, l2, kinetic - integral_power5(u) / 5.0


def conservation_report(traj):
    vals = np.array([invariants(traj[i], traj.nonlinear) for i in range(len(traj))])
    return EnergyReport(traj.times.copy(), vals[:, 0], vals[:, 1], vals[:, 2])
