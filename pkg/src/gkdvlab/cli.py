"""Command-line front end.

Exit codes: 0 success, 2 configuration or precondition error, 3 numerical
abort, 4 a ``--verify`` check failed.
"""

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checkpoint import read_checkpoint, write_checkpoint
from .config import ConfigError, ExperimentConfig, load_config
from .conservation import (
    InsufficientSignalError,
    dyadic_sigmas,
    fit_exponent,
    is_monotone,
    sweep_rows,
)
from .data import make_datum
from .gevrey import (
    SpaceTimeField,
    default_band,
    estimate_radius,
    gevrey_norm,
    measure_A,
    probe_multilinear,
)
from .scheduler import NormRecorder, ShortTimeError, induction_report, local_timestep, make_plan
from .solver import SolverAbort, SolverConfig, conservation_report, evolve
from .spectral import OverflowGuardError
from .symbol import fuzz

log = logging.getLogger("gkdvlab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


def fmt(x):
    """Round-trip-safe decimal: 17 significant digits."""
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def write_json(path, obj):
    text = json.dumps(obj, indent=2, default=_jsonable)
    Path(path).write_text(text + "\n")
    return text


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _clean(obj):
    """Replace non-finite floats by None so the output stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return None
    return obj


def load_datum(cfg):
    d = cfg.datum
    if d.family == "file":
        return read_checkpoint(d.path).to_field()
    return make_datum(cfg.make_grid(), d.family, amplitude=d.amplitude, width=d.width,
                      center=d.center, mode=d.mode, c=d.c)


def _solver_config(cfg, T=None, dt=None, stride=None):
    s = cfg.solver
    return SolverConfig(dt=dt or s.dt, T=T or s.T, sample_stride=stride or s.stride,
                        nonlinearity_enabled=s.nonlinear, dealias=s.dealias, cfl=s.cfl)


def _band(cfg):
    a = cfg.analytics
    if a.band_lo is None and a.band_hi is None:
        return None
    lo, hi = default_band(cfg.make_grid())
    return (a.band_lo if a.band_lo is not None else lo, a.band_hi if a.band_hi is not None else hi)


# -- subcommands -------------------------------------------------------------------


def cmd_simulate(cfg, out, args):
    u0 = load_datum(cfg)
    traj = evolve(u0, _solver_config(cfg))
    rep = conservation_report(traj)
    sigmas = cfg.analytics.sigmas
    A = [measure_A(traj, s)[1] for s in sigmas]
    band = _band(cfg)
    header = ["t", "l2", "mass", "hamiltonian"] + [f"A_sigma={fmt(s)}" for s in sigmas] + ["sigma_hat"]
    rows = []
    for i, t in enumerate(traj.times):
        est = estimate_radius(traj[i], band=band, strict=False)
        rows.append([t, rep.l2[i], rep.mass[i], rep.hamiltonian[i], *(a[i] for a in A), est.sigma_hat])
    write_csv(out / "simulate.csv", header, rows)
    for tc in cfg.solver.checkpoint_times:
        i = int(np.argmin(np.abs(traj.times - tc)))
        write_checkpoint(out / f"checkpoint_t{traj.times[i]:.6g}.gkdv", traj[i], traj.times[i])
    log.info("simulate: %d samples, L2 drift %.3g", len(traj), rep.drift("l2"))
    return EXIT_OK


def cmd_radius(cfg, out, args):
    est = estimate_radius(load_datum(cfg), band=_band(cfg), strict=False)
    print(write_json(out / "radius.json", _clean(est.as_dict())))
    return EXIT_OK


def _sweep_delta(cfg, u0):
    a = cfg.analytics
    if a.delta is not None:
        return a.delta
    return local_timestep(gevrey_norm(u0, a.sigma0), cfg.scheduler.c0, cfg.scheduler.r)


def cmd_sweep_sigma(cfg, out, args):
    a = cfg.analytics
    u0 = load_datum(cfg)
    delta = _sweep_delta(cfg, u0)
    traj = evolve(u0, _solver_config(cfg, T=delta, dt=delta / a.steps_per_delta, stride=1))
    rows = sweep_rows(traj, u0, dyadic_sigmas(a.sigma0, a.sweep_lo, a.sweep_hi))
    write_csv(out / "sweep_sigma.csv", ["sigma", "delta_e", "bound", "ratio", "flag"],
              [[r.sigma, r.delta_e, r.bound, r.ratio, r.flag] for r in rows])
    side = {"delta": delta, "sigma0": a.sigma0, "rows": len(rows), "monotone": is_monotone(rows)}
    try:
        exponent, spread = fit_exponent(rows)
    except InsufficientSignalError as exc:
        side["error"] = str(exc)
        print(write_json(out / "sweep_sigma.json", side))
        log.error("%s", exc)
        return EXIT_NUMERIC
    side.update({"fitted_exponent": exponent, "ratio_spread": spread})
    print(write_json(out / "sweep_sigma.json", side))
    if args.verify and not (exponent >= 0.45 and spread < 50):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_fuzz_symbol(cfg, out, args):
    sy = cfg.symbol
    report = fuzz(sy.samples, seed=cfg.run.seed, xi_range=(sy.xi_low, sy.xi_high),
                  sigma_max=sy.sigma_max, thetas=sy.thetas, order=sy.order,
                  exhaustive=sy.exhaustive)
    print(write_json(out / "fuzz_symbol.json", _clean(report)))
    bad = report["violations"] + report.get("exhaustive", {}).get("violations", 0)
    if args.verify and bad:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_schedule(cfg, out, args):
    sc, a = cfg.scheduler, cfg.analytics
    u0 = None
    A0 = sc.A0
    if A0 is None or args.verify:
        u0 = load_datum(cfg)
        A0 = gevrey_norm(u0, a.sigma0)
    plan = make_plan(A0, a.sigma0, sc.T, sc.c0, sc.r, sc.C)
    result = {"plan": plan.as_dict()}
    code = EXIT_OK
    if args.verify:
        dt = min(cfg.solver.dt, plan.delta)
        rec = NormRecorder(u0.grid, plan.sigma)
        # only the streamed norms are needed; keep the stored snapshots sparse
        evolve(u0, _solver_config(cfg, T=plan.n * plan.delta, dt=dt, stride=10**9), callback=rec)
        report = induction_report(rec.times, rec.values, plan.sigma, A0, sc.C, plan.delta, plan.n)
        result["verification"] = report.as_dict()
        if report.failures:
            code = EXIT_VERIFY
    write_json(out / "schedule.json", _clean(result))
    if "verification" in result:
        # per-step margins go to the file only
        result["verification"] = {k: v for k, v in result["verification"].items() if k != "per_step"}
    print(json.dumps(_clean(result), indent=2, default=_jsonable))
    return code


def cmd_probe_multilinear(cfg, out, args):
    a = cfg.analytics
    u0 = load_datum(cfg)
    delta = _sweep_delta(cfg, u0)
    steps = max(a.steps_per_delta, 16)
    traj = evolve(u0, _solver_config(cfg, T=delta, dt=delta / steps, stride=1))
    seg = SpaceTimeField.from_trajectory(traj)
    rows = []
    for sigma in a.sigmas:
        ratio = probe_multilinear([seg] * 4, s=a.s, b=a.b, b_prime=a.b_prime, sigma=sigma)
        rows.append([sigma, ratio])
    write_csv(out / "probe_multilinear.csv", ["sigma", "ratio"], rows)
    ratios = [r[1] for r in rows]
    summary = {"delta": delta, "samples": seg.M, "s": a.s, "b": a.b, "b_prime": a.b_prime,
               "ratio_max": max(ratios), "ratio_min": min(ratios)}
    print(write_json(out / "probe_multilinear.json", _clean(summary)))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "radius": cmd_radius,
    "sweep-sigma": cmd_sweep_sigma,
    "fuzz-symbol": cmd_fuzz_symbol,
    "schedule": cmd_schedule,
    "probe-multilinear": cmd_probe_multilinear,
}


def build_parser():
    p = argparse.ArgumentParser(prog="gkdvlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="INI configuration file")
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        sp.add_argument("--seed", type=int, help="override run.seed")
        sp.add_argument("--samples", type=int, help="override symbol.samples")
        sp.add_argument("--verify", action="store_true",
                        help="run the acceptance check and exit 4 on failure")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg = cfg.replace("run", seed=args.seed)
        if args.samples is not None:
            cfg = cfg.replace("symbol", samples=args.samples)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args.out, args)
    except (ConfigError, ShortTimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverAbort, OverflowGuardError, InsufficientSignalError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
