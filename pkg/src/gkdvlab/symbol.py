"""Checks of the exponential symbol inequality for four frequencies::

    exp(sigma sum|xi_j|) - exp(sigma |sum xi_j|) <= (24 sigma xi_rd)^theta exp(sigma sum|xi_j|)

``xi_rd`` is the third largest of ``|xi_1|..|xi_4|``. Dividing by
``exp(sigma sum|xi_j|)`` gives the overflow-free form used by the scanners,
``-expm1(-sigma * gap) <= (24 sigma xi_rd)^theta`` with
``gap = sum|xi_j| - |sum xi_j|``.

Passing ``order="nd"`` swaps ``xi_rd`` for the second largest ``xi_nd``.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spectral import EXP_LIMIT

CONSTANT = 24.0
DEFAULT_THETAS = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_SEED = 20160726


@dataclass(frozen=True)
class FrequencyQuadruple:
    xi1: float
    xi2: float
    xi3: float
    xi4: float

    @property
    def values(self):
        return (self.xi1, self.xi2, self.xi3, self.xi4)

    @property
    def ordered(self):
        """``(xi_min, xi_rd, xi_nd, xi_max)`` of the absolute values."""
        return tuple(sorted(abs(v) for v in self.values))

    @property
    def xi_min(self):
        return self.ordered[0]

    @property
    def xi_rd(self):
        return self.ordered[1]

    @property
    def xi_nd(self):
        return self.ordered[2]

    @property
    def xi_max(self):
        return self.ordered[3]

    def gap(self):
        """``sum|xi_j| - |sum xi_j|`` via the pairwise form, free of cancellation."""
        return float(_kernels.gap_numpy(np.array([self.values], dtype=float))[0])


def _as_quadruple(q):
    return q if isinstance(q, FrequencyQuadruple) else FrequencyQuadruple(*map(float, q))


def _order_stat(q, order):
    if order == "rd":
        return q.xi_rd
    if order == "nd":
        return q.xi_nd
    raise ValueError(f"order must be 'rd' or 'nd', got {order!r}")


def _guard(q, sigma):
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    total = sum(abs(v) for v in q.values)
    if sigma * total > EXP_LIMIT:
        raise OverflowError(
            f"sigma*sum|xi| = {sigma * total:.4g} exceeds {EXP_LIMIT:g}; use the scaled scan instead"
        )
    return total


def symbol_gap(q, sigma):
    """``(lhs, sum|xi_j|)`` with ``lhs = e^{sigma sum|xi|} - e^{sigma|sum xi|}`` (>= 0)."""
    q = _as_quadruple(q)
    total = _guard(q, sigma)
    lhs = math.exp(sigma * abs(sum(q.values))) * math.expm1(sigma * q.gap())
    return lhs, total


@dataclass(frozen=True)
class SymbolCheck:
    passed: bool
    lhs: float
    rhs: float
    slack: float

    @property
    def relative_slack(self):
        """``slack / rhs``; 1 when lhs vanishes, negative on violation."""
        if self.rhs == 0.0:
            return 1.0 if self.lhs == 0.0 else -math.inf
        return self.slack / self.rhs


def check_symbol_bound(q, sigma, theta, order="rd"):
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    q = _as_quadruple(q)
    lhs, total = symbol_gap(q, sigma)
    base = CONSTANT * sigma * _order_stat(q, order)
    factor = 1.0 if theta == 0 else base**theta
    rhs = factor * math.exp(sigma * total)
    # decide in the scaled form; the unscaled products round differently near equality
    passed = -math.expm1(-sigma * q.gap()) <= factor
    return SymbolCheck(passed, lhs, rhs, rhs - lhs)


# -- scans ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    thetas: tuple
    samples: int
    violations: tuple
    max_excess: tuple
    worst: tuple
    empirical_constant: tuple

    @property
    def total_violations(self):
        return int(sum(self.violations))


def scan(xi, sigma, thetas=DEFAULT_THETAS, order="rd"):
    """Check every row of ``xi`` (shape (n, 4)) with matching ``sigma`` against all thetas."""
    if order not in ("rd", "nd"):
        raise ValueError(f"order must be 'rd' or 'nd', got {order!r}")
    xi = np.asarray(xi, dtype=float).reshape(-1, 4)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (xi.shape[0],))
    th = tuple(float(t) for t in thetas)
    viol, excess, worst, const = _kernels.symbol_scan(xi, sigma, np.array(th), order == "nd")
    worst_cases = tuple(
        (tuple(float(v) for v in xi[i]), float(sigma[i])) if i >= 0 else None for i in worst
    )
    return ScanResult(
        th,
        int(xi.shape[0]),
        tuple(int(v) for v in viol),
        tuple(float(v) for v in excess),
        worst_cases,
        tuple(float(v) for v in const),
    )


def random_samples(n, seed=DEFAULT_SEED, xi_range=(-100.0, 100.0), sigma_max=5.0):
    """``n`` quadruples uniform on ``xi_range`` and sigma uniform on ``(0, sigma_max]``."""
    rng = np.random.default_rng(seed)
    xi = rng.uniform(xi_range[0], xi_range[1], size=(n, 4))
    # uniform on (0, sigma_max]: reflect the half-open [0, 1) draw
    sigma = sigma_max * (1.0 - rng.random(n))
    return xi, sigma


def integer_grid(lo=-5, hi=5, sigmas=(0.1, 1.0)):
    """Every integer quadruple in ``[lo, hi]^4`` paired with every sigma."""
    pts = np.array(list(itertools.product(range(lo, hi + 1), repeat=4)), dtype=float)
    xi = np.tile(pts, (len(sigmas), 1))
    sigma = np.repeat(np.asarray(sigmas, dtype=float), pts.shape[0])
    return xi, sigma


def fuzz(samples, seed=DEFAULT_SEED, xi_range=(-100.0, 100.0), sigma_max=5.0,
         thetas=DEFAULT_THETAS, order="rd", exhaustive=True):
    """Randomized scan plus (optionally) the exhaustive integer grid, as a JSON-ready dict."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    xi, sigma = random_samples(samples, seed, xi_range, sigma_max)
    rnd = scan(xi, sigma, thetas, order)
    report = _report(rnd)
    report.update({"seed": seed, "order": order, "xi_range": list(xi_range), "sigma_max": sigma_max})
    if exhaustive:
        grid = scan(*integer_grid(), thetas=(0.0, 0.5, 1.0), order=order)
        report["exhaustive"] = _report(grid)
    return report


def _report(res):
    i = int(np.argmax(res.max_excess))
    constants = [c for c, t in zip(res.empirical_constant, res.thetas) if t > 0]
    worst = res.worst[i]
    return {
        "samples": res.samples,
        "violations": res.total_violations,
        "violations_by_theta": {f"{t:g}": v for t, v in zip(res.thetas, res.violations)},
        "empirical_constant": max(constants) if constants else None,
        "empirical_constant_by_theta": {
            f"{t:g}": c for t, c in zip(res.thetas, res.empirical_constant) if t > 0
        },
        "worst_case_quadruple": None if worst is None else {
            "xi": list(worst[0]),
            "sigma": worst[1],
            "theta": res.thetas[i],
            "scaled_excess": res.max_excess[i],
        },
    }


def sharpness_profile(xi, sigma, theta=1.0, order="rd", bins=20):
    """Histogram of ``slack / rhs`` on [0, 1] and the largest observed constant.

    The constant is ``max (lhs / e^{sigma sum|xi|})^(1/theta) / (sigma xi_stat)``,
    directly comparable with 24 for every theta > 0. Violations show up as
    negative slack ratios and are counted below the histogram range.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    xi = np.asarray(xi, dtype=float).reshape(-1, 4)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (xi.shape[0],))
    ordered = np.sort(np.abs(xi), axis=1)
    stat = ordered[:, 2] if order == "nd" else ordered[:, 1]
    lhs = -np.expm1(-sigma * _kernels.gap_numpy(xi))
    rhs = (CONSTANT * sigma * stat) ** theta
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, (rhs - lhs) / rhs, np.where(lhs > 0, -np.inf, 1.0))
    counts, edges = np.histogram(np.clip(ratio, 0.0, 1.0)[ratio >= 0], bins=bins, range=(0.0, 1.0))
    _, _, _, const = _kernels.symbol_scan(xi, sigma, np.array([theta]), order == "nd")
    return {
        "samples": int(xi.shape[0]),
        "bin_edges": edges.tolist(),
        "counts": counts.tolist(),
        "negative": int(np.count_nonzero(ratio < 0)),
        "min_slack_ratio": float(ratio.min()),
        "empirical_constant": float(const[0]),
    }
