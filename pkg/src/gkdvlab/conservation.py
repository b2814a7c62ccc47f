"""Gevrey-energy increments, the commutator term and sigma sweeps."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .gevrey import gevrey_norm, measure_A
from .solver import SolverConfig, evolve
from .spectral import SpectralField, derivative_symbol, power4_coeffs

#: increments below this multiple of A_sigma(0)^2 are indistinguishable from solver error
FLOOR_REL = 1e-10


class InsufficientSignalError(ValueError):
    pass


def _commutator_coeffs(c, grid, sigma):
    grid.check_sigma(sigma)
    if sigma == 0:
        return np.zeros_like(c)
    e = np.exp(sigma * grid.abs_k)
    inner = power4_coeffs(c * e) - e * power4_coeffs(c)
    return derivative_symbol(grid, 1) * inner


def commutator_f(u, sigma):
    """``d/dx { (e^{sigma|D|} u)^4 - e^{sigma|D|} (u^4) }``, products alias-free."""
    return SpectralField(u.grid, _commutator_coeffs(u.coeffs, u.grid, sigma))


def delta_energy(traj, sigma):
    """``(max_t A_sigma(t)^2 - A_sigma(0)^2, t_at_max)`` over the sampled times."""
    t, A = measure_A(traj, sigma)
    A2 = A**2
    i = int(np.argmax(A2))
    return float(A2[i] - A2[0]), float(t[i])


@dataclass(frozen=True)
class SigmaSweepRow:
    sigma: float
    delta_e: float
    bound: float
    ratio: float
    t_max: float
    below_floor: bool

    @property
    def flag(self):
        return "below-floor" if self.below_floor else "ok"


@dataclass(frozen=True)
class SweepResult:
    rows: list
    exponent: float
    ratio_spread: float
    delta: float

    def summary(self):
        ok = [r for r in self.rows if not r.below_floor]
        return {
            "delta": self.delta,
            "fitted_exponent": self.exponent,
            "ratio_max": max(r.ratio for r in ok),
            "ratio_min": min(r.ratio for r in ok),
            "ratio_spread": self.ratio_spread,
            "rows_used": len(ok),
            "rows_total": len(self.rows),
            "monotone": is_monotone(self.rows),
        }


def is_monotone(rows):
    """Whether the increment is nondecreasing in sigma across the rows (recorded, not enforced)."""
    de = [r.delta_e for r in sorted(rows, key=lambda r: r.sigma)]
    return bool(all(b >= a for a, b in zip(de, de[1:])))


def sweep_rows(traj, u0, sigmas):
    rows = []
    for sigma in sigmas:
        if not sigma > 0:
            raise ValueError(f"sweep values must be positive, got {sigma}")
        de, tmax = delta_energy(traj, sigma)
        A0 = gevrey_norm(u0, sigma)
        bound = math.sqrt(sigma) * A0**5
        floor = FLOOR_REL * A0**2
        below = de <= floor
        ratio = de / bound if bound > 0 else math.nan
        rows.append(SigmaSweepRow(sigma, de, bound, ratio, tmax, below))
    return rows


def fit_exponent(rows):
    """Least-squares slope of log(delta_e) against log(sigma) over rows above the floor."""
    ok = [r for r in rows if not r.below_floor]
    if len(ok) < 2:
        raise InsufficientSignalError(
            f"insufficient signal: {len(ok)} of {len(rows)} rows above the measurement floor"
        )
    x = np.log([r.sigma for r in ok])
    y = np.log([r.delta_e for r in ok])
    slope = np.polyfit(x, y, 1)[0]
    ratios = [r.ratio for r in ok]
    return float(slope), float(max(ratios) / min(ratios))


def sigma_sweep(u0, delta, sigmas, dt, sample_stride=1, traj=None):
    """Measure the increment on ``[0, delta]`` for each sigma and fit its power law.

    The evolution does not depend on sigma, so one trajectory serves every row;
    pass ``traj`` to reuse one already computed.
    """
    if traj is None:
        traj = evolve(u0, SolverConfig(dt=dt, T=delta, sample_stride=sample_stride))
    rows = sweep_rows(traj, u0, sigmas)
    exponent, spread = fit_exponent(rows)
    return SweepResult(rows, exponent, spread, float(delta))


def dyadic_sigmas(sigma0, lo_exp, hi_exp):
    """``[2**lo_exp * sigma0, ..., 2**hi_exp * sigma0]``."""
    return [sigma0 * 2.0**e for e in range(lo_exp, hi_exp + 1)]


# -- energy identity ----------------------------------------------------------------


def energy_rate(u, sigma):
    """``2 * integral v f dx`` with ``v = e^{sigma|D|} u``, f the commutator term."""
    g = u.grid
    v = u.coeffs * np.exp(sigma * g.abs_k)
    f = _commutator_coeffs(u.coeffs, g, sigma)
    return 2.0 * g.L * float(np.real(np.vdot(v, f)))


def energy_identity_terms(traj, sigma):
    """``(A^2(t_end) - A^2(0), time-integral of 2 int v f dx)``; Simpson in time.

    A linear-only trajectory has no quartic term, hence f = 0.
    """
    _, A = measure_A(traj, sigma)
    if not traj.nonlinear:
        return float(A[-1] ** 2 - A[0] ** 2), 0.0
    rates = np.array([energy_rate(traj[i], sigma) for i in range(len(traj))])
    return float(A[-1] ** 2 - A[0] ** 2), float(simpson(rates, x=traj.times))


def energy_identity_residual(traj, sigma):
    """``|lhs - rhs| / A_sigma(0)^2`` for the identity ``d/dt ||v||^2 = 2 int v f``."""
    lhs, rhs = energy_identity_terms(traj, sigma)
    A0 = gevrey_norm(traj[0], sigma)
    if A0 == 0.0:
        return 0.0
    return abs(lhs - rhs) / A0**2
