import math

import numpy as np
import pytest

from gkdvlab.conservation import (
    InsufficientSignalError,
    SigmaSweepRow,
    SweepResult,
    commutator_f,
    delta_energy,
    dyadic_sigmas,
    energy_identity_residual,
    energy_identity_terms,
    energy_rate,
    fit_exponent,
    is_monotone,
    sigma_sweep,
    sweep_rows,
)
from gkdvlab.data import make_datum
from gkdvlab.gevrey import gevrey_norm
from gkdvlab.solver import SolverConfig, Trajectory, evolve
from gkdvlab.spectral import SpectralField, make_grid

from conftest import random_field


def test_commutator_of_cosine():
    # (e^{s|D|} cos)^4 - e^{s|D|} cos^4 = 3/8 (e^{4s} - 1) + (e^{4s} - e^{2s}) cos(2x)/2
    g = make_grid(16, 2 * np.pi)
    s = 0.3
    f = commutator_f(make_datum(g, "cosine"), s).to_samples()
    expect = -(math.exp(4 * s) - math.exp(2 * s)) * np.sin(2 * g.x)
    assert np.allclose(f, expect, atol=1e-13)


@pytest.mark.parametrize("mode", [1, 3])
def test_commutator_single_mode_oracle(mode):
    # oracle: evaluate both terms on an 8x oversampled grid with direct sums
    g = make_grid(32, 2 * np.pi)
    s = 0.2
    M = 8 * g.N
    x = 2 * np.pi * np.arange(M) / M
    w = math.exp(s * mode)
    inner = (w * np.cos(mode * x)) ** 4
    q = np.cos(mode * x) ** 4
    ks = np.arange(-(g.N // 2) + 1, g.N // 2)
    expect = np.zeros(g.N, dtype=complex)
    for m in ks:
        basis = np.exp(-1j * m * x)
        lifted = np.mean(q * basis) * math.exp(s * abs(m))
        expect[m % g.N] = 1j * m * (np.mean(inner * basis) - lifted)
    got = commutator_f(make_datum(g, "cosine", mode=mode), s).coeffs
    assert np.max(np.abs(got - expect)) < 1e-11


def test_commutator_has_zero_mean(rng):
    g = make_grid(32, 2 * np.pi)
    assert commutator_f(random_field(g, rng), 0.4).coeffs[0] == 0


def test_commutator_vanishes_at_sigma_zero(rng):
    g = make_grid(32, 2 * np.pi)
    assert np.all(commutator_f(random_field(g, rng), 0.0).coeffs == 0)


def test_l2_rate_vanishes(rng):
    # at sigma=0 the quartic term is exactly L2 neutral
    g = make_grid(32, 2 * np.pi)
    assert energy_rate(random_field(g, rng), 0.0) == 0.0


def test_energy_rate_matches_trajectory_derivative():
    g = make_grid(128, 40.0)
    u0 = make_datum(g, "sech", amplitude=-1.0, width=1.5)
    sigma = 0.2
    h = 1e-4
    traj = evolve(u0, SolverConfig(dt=h / 4, T=h))
    A2 = [gevrey_norm(traj[i], sigma) ** 2 for i in (0, -1)]
    centered = evolve(u0, SolverConfig(dt=h / 8, T=h / 2)).final
    fd = (A2[1] - A2[0]) / h
    assert fd == pytest.approx(energy_rate(centered, sigma), rel=1e-6)


def test_energy_identity_small_residual():
    g = make_grid(128, 40.0)
    u0 = make_datum(g, "sech", amplitude=-1.0, width=1.5)
    traj = evolve(u0, SolverConfig(dt=2e-3, T=0.1))
    lhs, rhs = energy_identity_terms(traj, 0.2)
    assert lhs != 0
    assert energy_identity_residual(traj, 0.2) < 1e-8


def test_delta_energy_sigma_zero_and_linear():
    g = make_grid(128, 40.0)
    u0 = make_datum(g, "sech", amplitude=-1.0, width=1.5)
    traj = evolve(u0, SolverConfig(dt=2e-3, T=0.2))
    A2 = gevrey_norm(u0, 0.0) ** 2
    assert abs(delta_energy(traj, 0.0)[0]) <= 1e-8 * A2
    for sigma in (0.05, 0.2, 0.5):
        assert delta_energy(traj, sigma)[0] >= -1e-10 * gevrey_norm(u0, sigma) ** 2
    free = evolve(u0, SolverConfig(dt=2e-3, T=0.2, nonlinearity_enabled=False))
    assert delta_energy(free, 0.3)[0] == pytest.approx(0.0, abs=1e-12 * gevrey_norm(u0, 0.3) ** 2)
    lhs, rhs = energy_identity_terms(free, 0.3)
    assert rhs == 0.0
    assert lhs == pytest.approx(0.0, abs=1e-12 * gevrey_norm(u0, 0.3) ** 2)


def test_monotone_record():
    rows = [_row(0.1, 1.0), _row(0.2, 2.0), _row(0.4, 3.0)]
    assert is_monotone(rows)
    assert not is_monotone(rows + [_row(0.8, 2.5)])
    res = SweepResult(rows, 1.0, 1.5, 0.01)
    assert res.summary()["monotone"] is True


def test_delta_energy_picks_maximum():
    g = make_grid(16, 2 * np.pi)
    c = np.zeros((3, 16), dtype=complex)
    c[:, 1] = c[:, -1] = [0.5, 0.7, 0.6]
    de, tmax = delta_energy(Trajectory(g, np.array([0.0, 1.0, 2.0]), c), 0.0)
    assert de == pytest.approx(2 * np.pi * 2 * (0.49 - 0.25))
    assert tmax == 1.0


def test_dyadic_sigmas():
    assert dyadic_sigmas(1.0, -9, -2) == [2.0**e for e in range(-9, -1)]
    assert len(dyadic_sigmas(0.5, -9, -2)) == 8


def _row(sigma, de, below=False):
    return SigmaSweepRow(sigma, de, math.sqrt(sigma), de / math.sqrt(sigma), 0.0, below)


def test_fit_exponent_exact_power_law():
    rows = [_row(s, 3.0 * s**1.25) for s in dyadic_sigmas(1.0, -8, -2)]
    slope, spread = fit_exponent(rows)
    assert slope == pytest.approx(1.25, rel=1e-12)
    assert spread == pytest.approx(2.0 ** (0.75 * 6), rel=1e-12)


def test_fit_skips_floor_rows():
    rows = [_row(0.1, 1e-3), _row(0.2, 4e-3), _row(0.4, 1e-20, below=True)]
    slope, _ = fit_exponent(rows)
    assert slope == pytest.approx(2.0)


def test_insufficient_signal():
    rows = [_row(0.1, 0.0, below=True), _row(0.2, 1e-3)]
    with pytest.raises(InsufficientSignalError, match="insufficient signal"):
        fit_exponent(rows)


def test_zero_datum_has_no_signal():
    g = make_grid(64, 20.0)
    with pytest.raises(InsufficientSignalError):
        sigma_sweep(SpectralField.zeros(g), 0.01, [0.1, 0.2], dt=1e-3)


def test_sweep_rows_flag_and_ratio():
    g = make_grid(256, 40 * np.pi / 4)
    u0 = make_datum(g, "sech", amplitude=-1.0)
    traj = evolve(u0, SolverConfig(dt=1e-4, T=4e-3))
    rows = sweep_rows(traj, u0, [0.05, 0.1])
    for r in rows:
        assert r.flag in ("ok", "below-floor")
        assert r.bound == pytest.approx(math.sqrt(r.sigma) * gevrey_norm(u0, r.sigma) ** 5)
    with pytest.raises(ValueError):
        sweep_rows(traj, u0, [0.0])
