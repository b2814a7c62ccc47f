"""Uniform-step continuation scheme: local step, strip width and induction checks.

With ``A0 = ||u0||_{G^{sigma0}}``::

    delta = c0 (1 + A0)^(-r)
    sigma = (delta / (2^(7/2) C T A0^3))^2 = c1 T^(-2)

and for ``k = 1..n`` (``n = floor(T/delta)``) the measured norms must obey::

    sup_{[0, k delta]} A_sigma^2 <= A_sigma(0)^2 + k C sigma^(1/2) 2^(5/2) A0^5
    sup_{[0, k delta]} A_sigma^2 <= 2 A0^2
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._kernels import gevrey_weight, scaled_norm
from .gevrey import gevrey_norm, measure_A

DEFAULT_C0 = 0.1
DEFAULT_R = 2.0
DEFAULT_C = 1.0

_TWO_7_2 = 2.0**3.5
_TWO_5_2 = 2.0**2.5


class ShortTimeError(ValueError):
    """``T < delta``: the local result alone covers the horizon."""


def local_timestep(A0, c0=DEFAULT_C0, r=DEFAULT_R):
    if A0 < 0:
        raise ValueError(f"A0 must be >= 0, got {A0}")
    if not c0 > 0:
        raise ValueError(f"c0 must be positive, got {c0}")
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r}")
    return c0 * (1.0 + A0) ** (-r)


def _uncapped_width(T, delta, A0, C):
    return (delta / (_TWO_7_2 * C * T * A0**3)) ** 2


def strip_width(T, delta, A0, C=DEFAULT_C, sigma0=math.inf):
    """Strip width at equality in ``(2T/delta) C sigma^(1/2) 2^(5/2) A0^3 = 1``, capped at ``sigma0``."""
    if T < delta:
        raise ShortTimeError(
            f"T={T:g} < delta={delta:g}: the local step already covers [0, T] at the "
            "initial width; no continuation is needed"
        )
    if not A0 > 0:
        raise ValueError(f"A0 must be positive, got {A0}")
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    return min(_uncapped_width(T, delta, A0, C), sigma0)


def coefficient_c1(A0, c0=DEFAULT_C0, r=DEFAULT_R, C=DEFAULT_C):
    """``c1`` with ``sigma = c1 T^-2``: ``(c0 / (C 2^(7/2) A0^3 (1 + A0)^r))^2``."""
    return (c0 / (C * _TWO_7_2 * A0**3 * (1.0 + A0) ** r)) ** 2


@dataclass(frozen=True)
class SchedulePlan:
    T: float
    A0: float
    sigma0: float
    c0: float
    r: float
    C: float
    delta: float
    n: int
    sigma: float
    c1: float
    capped: bool
    s: float = 0.0
    #: width of the Gevrey space G^{sigma_final, s} reached; sigma/2 when s != 0
    sigma_final: float = math.nan

    def as_dict(self):
        return asdict(self)

    def curve(self, t):
        """``min(sigma0, c1 t^-2)``, the plan's lower envelope for the radius."""
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return np.minimum(self.sigma0, self.c1 / t**2)


def make_plan(A0, sigma0, T, c0=DEFAULT_C0, r=DEFAULT_R, C=DEFAULT_C, s=0.0):
    delta = local_timestep(A0, c0, r)
    sigma = strip_width(T, delta, A0, C, sigma0)
    c1 = coefficient_c1(A0, c0, r, C)
    n = math.floor(T / delta)
    # guard the floor against T/delta landing a hair below an integer
    if (n + 1) * delta <= T:
        n += 1
    capped = _uncapped_width(T, delta, A0, C) > sigma0
    final = sigma if s == 0 else 0.5 * sigma
    return SchedulePlan(T, A0, sigma0, c0, r, C, delta, n, sigma, c1, capped, s, final)


def plan_for_datum(u0, sigma0, T, c0=DEFAULT_C0, r=DEFAULT_R, C=DEFAULT_C, s=0.0):
    """Plan from a datum; for ``s != 0`` run the s=0 scheme at ``sigma0/2``."""
    width = sigma0 if s == 0 else 0.5 * sigma0
    return make_plan(gevrey_norm(u0, width), width, T, c0, r, C, s)


@dataclass(frozen=True)
class InductionStep:
    k: int
    t: float
    sup_A2: float
    bound1: float
    bound2: float
    margin1: float
    margin2: float

    @property
    def passed(self):
        return self.margin1 >= 0 and self.margin2 >= 0


@dataclass(frozen=True)
class InductionReport:
    steps: list
    sigma: float
    A0: float
    C: float
    #: smallest C for which every first-inequality step holds
    C_min: float

    @property
    def failures(self):
        return sum(not s.passed for s in self.steps)

    def as_dict(self):
        return {
            "sigma": self.sigma,
            "A0": self.A0,
            "C": self.C,
            "C_min": self.C_min,
            "steps": len(self.steps),
            "failures": self.failures,
            "min_margin1": min(s.margin1 for s in self.steps),
            "min_margin2": min(s.margin2 for s in self.steps),
            "per_step": [
                {"k": s.k, "t": s.t, "sup_A2": s.sup_A2, "margin1": s.margin1,
                 "margin2": s.margin2, "passed": s.passed}
                for s in self.steps
            ],
        }


def induction_report(times, A2, sigma, A0, C, delta, n=None):
    """Both induction inequalities for k = 1..n from a sampled series ``A_sigma(t)^2``."""
    t = np.asarray(times, dtype=float)
    A2 = np.asarray(A2, dtype=float)
    if n is None:
        n = math.floor(t[-1] / delta + 1e-9)
    if n < 1:
        raise ValueError("trajectory shorter than one local step")
    if t[-1] < n * delta * (1 - 1e-9):
        raise ValueError(f"trajectory ends at {t[-1]:g} < n*delta = {n * delta:g}")
    running = np.maximum.accumulate(A2)
    unit = math.sqrt(sigma) * _TWO_5_2 * A0**5
    steps = []
    c_needed = 0.0
    for k in range(1, n + 1):
        tk = k * delta
        idx = int(np.searchsorted(t, tk * (1 + 1e-12), side="right")) - 1
        sup = float(running[idx])
        b1 = A2[0] + k * C * unit
        b2 = 2.0 * A0**2
        steps.append(InductionStep(k, tk, sup, b1, b2, b1 - sup, b2 - sup))
        if unit > 0:
            c_needed = max(c_needed, (sup - A2[0]) / (k * unit))
    return InductionReport(steps, sigma, A0, C, float(max(c_needed, 0.0)))


def verify_induction(traj, sigma, sigma0, C, delta, n=None, A0=None):
    """Evaluate both induction inequalities with measured norms for k = 1..n.

    ``A0`` defaults to the measured ``A_{sigma0}`` of the first snapshot.
    """
    if A0 is None:
        A0 = gevrey_norm(traj[0], sigma0)
    t, A = measure_A(traj, sigma)
    return induction_report(t, A**2, sigma, A0, C, delta, n)


class NormRecorder:
    """``evolve`` callback recording ``A_sigma(t)^2`` at every step."""

    def __init__(self, grid, sigma):
        grid.check_sigma(sigma)
        self.weight = gevrey_weight(grid.k, sigma, 0.0)
        self.L = grid.L
        self.times = []
        self.values = []

    def __call__(self, t, c):
        self.times.append(t)
        self.values.append(self.L * scaled_norm(c, self.weight) ** 2)
