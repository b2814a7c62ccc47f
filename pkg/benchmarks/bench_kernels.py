"""Time the numba and numpy variants of the hot kernels side by side.

    python benchmarks/bench_kernels.py --repeat 5

The compiled variant is warmed up once before timing so JIT cost is excluded.
"""

import argparse
import time

import numpy as np

from gkdvlab import _kernels
from gkdvlab._accel import HAVE_NUMBA
from gkdvlab.symbol import random_samples


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n_modes, n_snapshots, n_quads):
    rng = np.random.default_rng(0)
    k = np.fft.fftfreq(n_modes, 1.0 / n_modes) * 0.05
    stack = (rng.standard_normal((n_snapshots, n_modes)) + 1j * rng.standard_normal((n_snapshots, n_modes)))
    stack *= np.exp(-np.abs(k))
    xi, sigma = random_samples(n_quads, seed=1)
    thetas = np.array([0.0, 0.5, 1.0])

    def l2(impl):
        return lambda: impl(k, stack, 0.5, 1.0)

    def sym(impl):
        return lambda: impl(xi, sigma, thetas, False)

    yield f"weighted_l2 ({n_snapshots} x N={n_modes})", l2(_kernels.weighted_l2_numpy), l2(_kernels.weighted_l2_numba)
    yield f"symbol_scan ({n_quads} quadruples)", sym(_kernels.symbol_scan_numpy), sym(_kernels.symbol_scan_numba)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--modes", type=int, default=1024)
    p.add_argument("--snapshots", type=int, default=2000)
    p.add_argument("--quadruples", type=int, default=1_000_000)
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1
    print(f"{'kernel':<36} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for name, slow, fast in cases(args.modes, args.snapshots, args.quadruples):
        fast()  # compile
        t_np = best_of(slow, args.repeat)
        t_nb = best_of(fast, args.repeat)
        print(f"{name:<36} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
