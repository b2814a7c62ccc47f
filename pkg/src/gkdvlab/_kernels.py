"""Hot inner loops, each with a numba and a numpy implementation.

The public names (``weighted_l2``, ``scaled_norm``, ``symbol_scan``) dispatch according to
``gkdvlab._accel.USE_NUMBA``. Both variants are importable directly so tests
and the benchmark can compare them.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit


# -- weighted spectral l2 sum -------------------------------------------------


def gevrey_weight(k, sigma, s):
    """``exp(sigma|k|) <k>^s``; finite whenever ``sigma*|k| <= 700``."""
    w = np.exp(sigma * np.abs(k))
    if s != 0.0:
        w = w * (1.0 + k * k) ** (0.5 * s)
    return w


def scaled_norm_numpy(coeffs, weight):
    """``sqrt(sum |c|^2 w^2)`` along the last axis, scaled by the largest term."""
    c = np.atleast_2d(coeffs)
    w = np.abs(c) * weight
    top = w.max(axis=1, initial=0.0)
    safe = np.where(top > 0.0, top, 1.0)
    out = top * np.sqrt(np.sum((w / safe[:, None]) ** 2, axis=1))
    return out if np.ndim(coeffs) == 2 else float(out[0])


def _scaled_norm_loop(coeffs, weight):
    rows, n = coeffs.shape
    out = np.zeros(rows)
    for r in range(rows):
        # two passes over cheap arithmetic: the largest term, then the scaled squares
        top = 0.0
        for i in range(n):
            c = coeffs[r, i]
            w = math.sqrt(c.real * c.real + c.imag * c.imag) * weight[i]
            if w > top:
                top = w
        if top == 0.0:
            continue
        inv = 1.0 / top
        acc = 0.0
        for i in range(n):
            c = coeffs[r, i]
            w = math.sqrt(c.real * c.real + c.imag * c.imag) * weight[i] * inv
            acc += w * w
        out[r] = top * math.sqrt(acc)
    return out


scaled_norm_numba_rows = njit(_scaled_norm_loop)


def scaled_norm_numba(coeffs, weight):
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    out = scaled_norm_numba_rows(c.reshape(-1, c.shape[-1]), np.ascontiguousarray(weight, dtype=float))
    return out if c.ndim == 2 else float(out[0])


def weighted_l2_numpy(k, coeffs, sigma, s):
    return scaled_norm_numpy(coeffs, gevrey_weight(k, sigma, s))


def weighted_l2_numba(k, coeffs, sigma, s):
    return scaled_norm_numba(coeffs, gevrey_weight(k, sigma, s))


# -- symbol inequality scan ---------------------------------------------------


def gap_numpy(xi):
    """Sum|xi_j| - |sum xi_j| through the pairwise form (no cancellation)."""
    a = np.abs(xi)
    cross = np.zeros(xi.shape[0])
    for j in range(4):
        for m in range(j + 1, 4):
            opposite = (xi[:, j] * xi[:, m]) < 0.0
            cross += np.where(opposite, a[:, j] * a[:, m], 0.0)
    denom = a.sum(axis=1) + np.abs(xi.sum(axis=1))
    with np.errstate(invalid="ignore", divide="ignore"):
        g = np.where(denom > 0.0, 4.0 * cross / denom, 0.0)
    return g


def symbol_scan_numpy(xi, sigma, thetas, use_second):
    """Scan quadruples against ``1 - exp(-sigma*gap) <= (24*sigma*stat)**theta``.

    Returns ``(violations, max_excess, worst_index, max_constant)``, one entry
    per theta. ``stat`` is the third largest |xi_j| unless ``use_second``.
    """
    xi = np.asarray(xi, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    ordered = -np.sort(-np.abs(xi), axis=1)
    stat = ordered[:, 1] if use_second else ordered[:, 2]
    g = gap_numpy(xi)
    lhs = -np.expm1(-sigma * g)
    m = len(thetas)
    violations = np.zeros(m, dtype=np.int64)
    max_excess = np.full(m, -np.inf)
    worst = np.full(m, -1, dtype=np.int64)
    max_const = np.zeros(m)
    base = 24.0 * sigma * stat
    for j, theta in enumerate(thetas):
        rhs = np.ones_like(base) if theta == 0.0 else base**theta
        excess = lhs - rhs
        violations[j] = int(np.count_nonzero(excess > 0.0))
        if excess.size:
            worst[j] = int(np.argmax(excess))
            max_excess[j] = excess[worst[j]]
        if theta > 0.0:
            ok = (stat > 0.0) & (sigma > 0.0)
            if np.any(ok):
                const = lhs[ok] ** (1.0 / theta) / (sigma[ok] * stat[ok])
                max_const[j] = const.max()
        else:
            max_const[j] = np.nan
    return violations, max_excess, worst, max_const


def _symbol_scan_loop(xi, sigma, thetas, use_second):
    n = xi.shape[0]
    m = thetas.shape[0]
    violations = np.zeros(m, dtype=np.int64)
    max_excess = np.full(m, -np.inf)
    worst = np.full(m, -1, dtype=np.int64)
    max_const = np.zeros(m)
    for j in range(m):
        if thetas[j] == 0.0:
            max_const[j] = np.nan
    for i in range(n):
        x0, x1, x2, x3 = xi[i, 0], xi[i, 1], xi[i, 2], xi[i, 3]
        a0, a1, a2, a3 = abs(x0), abs(x1), abs(x2), abs(x3)
        cross = 0.0
        if x0 * x1 < 0.0:
            cross += a0 * a1
        if x0 * x2 < 0.0:
            cross += a0 * a2
        if x0 * x3 < 0.0:
            cross += a0 * a3
        if x1 * x2 < 0.0:
            cross += a1 * a2
        if x1 * x3 < 0.0:
            cross += a1 * a3
        if x2 * x3 < 0.0:
            cross += a2 * a3
        denom = a0 + a1 + a2 + a3 + abs(x0 + x1 + x2 + x3)
        g = 4.0 * cross / denom if denom > 0.0 else 0.0
        # five-comparator sorting network, ascending
        if a0 > a1:
            a0, a1 = a1, a0
        if a2 > a3:
            a2, a3 = a3, a2
        if a0 > a2:
            a0, a2 = a2, a0
        if a1 > a3:
            a1, a3 = a3, a1
        if a1 > a2:
            a1, a2 = a2, a1
        stat = a2 if use_second else a1
        s = sigma[i]
        lhs = -math.expm1(-s * g)
        base = 24.0 * s * stat
        for j in range(m):
            th = thetas[j]
            if th == 0.0:
                rhs = 1.0
            elif th == 1.0:
                rhs = base
            elif th == 0.5:
                rhs = math.sqrt(base)
            else:
                rhs = base**th
            excess = lhs - rhs
            if excess > 0.0:
                violations[j] += 1
            if excess > max_excess[j]:
                max_excess[j] = excess
                worst[j] = i
            if th > 0.0 and stat > 0.0 and s > 0.0:
                if th == 1.0:
                    c = lhs / (s * stat)
                elif th == 0.5:
                    c = lhs * lhs / (s * stat)
                else:
                    c = lhs ** (1.0 / th) / (s * stat)
                if c > max_const[j]:
                    max_const[j] = c
    return violations, max_excess, worst, max_const


symbol_scan_numba = njit(_symbol_scan_loop)


def weighted_l2(k, coeffs, sigma, s=0.0):
    """Gevrey-weighted l2 sum of one coefficient array, or of each row of a stack."""
    if USE_NUMBA:
        return weighted_l2_numba(k, coeffs, float(sigma), float(s))
    return weighted_l2_numpy(k, coeffs, float(sigma), float(s))


def scaled_norm(coeffs, weight):
    if USE_NUMBA:
        return scaled_norm_numba(coeffs, weight)
    return scaled_norm_numpy(coeffs, weight)


def symbol_scan(xi, sigma, thetas, use_second=False):
    xi = np.ascontiguousarray(xi, dtype=float)
    sigma = np.ascontiguousarray(sigma, dtype=float)
    thetas = np.ascontiguousarray(thetas, dtype=float)
    if USE_NUMBA:
        return symbol_scan_numba(xi, sigma, thetas, bool(use_second))
    return symbol_scan_numpy(xi, sigma, thetas, bool(use_second))
