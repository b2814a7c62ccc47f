"""Experiment configuration: INI file with one section per concern.

Every key is validated on load; unknown sections or keys are errors so a
typo cannot silently fall back to a default. Example::

    [grid]
    N = 1024
    L = 40*pi

    [datum]
    family = sech
    amplitude = -1

    [solver]
    dt = 1e-3
    T = 1.0

    [analytics]
    sigmas = 0.05, 0.1, 0.2
"""

import configparser
import dataclasses
import math
import re
from dataclasses import dataclass, field, fields

from .data import FAMILIES
from .spectral import Grid


class ConfigError(ValueError):
    pass


def parse_real(text):
    """Float, optionally written as a multiple of pi (``40*pi``, ``pi/2``, ``2pi``)."""
    t = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"([-+]?[0-9.eE+-]*)\*?pi(?:/([0-9.eE+-]+))?", t)
    if m:
        head = m.group(1)
        coef = 1.0 if head in ("", "+") else -1.0 if head == "-" else float(head)
        val = coef * math.pi
        return val / float(m.group(2)) if m.group(2) else val
    return float(t)


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_list(text):
    return tuple(parse_real(p) for p in text.replace(";", ",").split(",") if p.strip())


@dataclass(frozen=True)
class GridSection:
    N: int = 1024
    L: float = 40 * math.pi


@dataclass(frozen=True)
class DatumSection:
    family: str = "sech"
    amplitude: float = 1.0
    width: float = 1.0
    center: float | None = None
    mode: int = 1
    c: float = 1.0
    path: str | None = None


@dataclass(frozen=True)
class SolverSection:
    dt: float = 1e-3
    T: float = 1.0
    stride: int = 1
    nonlinear: bool = True
    dealias: bool = True
    cfl: float = 0.5
    checkpoint_times: tuple = ()


@dataclass(frozen=True)
class AnalyticsSection:
    sigmas: tuple = (0.0,)
    sigma0: float = 1.0
    s: float = 0.0
    b: float = 0.6
    b_prime: float = -0.4
    band_lo: float | None = None
    band_hi: float | None = None
    sweep_lo: int = -9
    sweep_hi: int = -2
    delta: float | None = None
    steps_per_delta: int = 40


@dataclass(frozen=True)
class SchedulerSection:
    c0: float = 0.1
    r: float = 2.0
    C: float = 1.0
    T: float = 10.0
    A0: float | None = None


@dataclass(frozen=True)
class SymbolSection:
    samples: int = 1_000_000
    xi_low: float = -100.0
    xi_high: float = 100.0
    sigma_max: float = 5.0
    thetas: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    order: str = "rd"
    exhaustive: bool = True


@dataclass(frozen=True)
class RunSection:
    seed: int = 20160726


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSection = field(default_factory=GridSection)
    datum: DatumSection = field(default_factory=DatumSection)
    solver: SolverSection = field(default_factory=SolverSection)
    analytics: AnalyticsSection = field(default_factory=AnalyticsSection)
    scheduler: SchedulerSection = field(default_factory=SchedulerSection)
    symbol: SymbolSection = field(default_factory=SymbolSection)
    run: RunSection = field(default_factory=RunSection)

    def make_grid(self):
        return Grid(self.grid.N, self.grid.L)

    def replace(self, section, **changes):
        sec = dataclasses.replace(getattr(self, section), **changes)
        out = dataclasses.replace(self, **{section: sec})
        validate(out)
        return out


_SECTIONS = {f.name: f.default_factory for f in fields(ExperimentConfig)}


def _converter(default, annotation):
    ann = str(annotation)
    if isinstance(default, bool) or "bool" in ann:
        return _parse_bool
    if isinstance(default, tuple):
        return _parse_list
    if isinstance(default, int) and "int" in ann:
        return lambda s: int(s.strip())
    if "str" in ann:
        return lambda s: s.strip()
    return parse_real


def load_config(path=None, text=None):
    """Parse an INI file (or string) into a validated :class:`ExperimentConfig`."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case sensitive (N, L, T, C)
    try:
        if text is not None:
            cp.read_string(text)
        elif path is not None:
            with open(path) as fh:
                cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc

    sections = {}
    for name in cp.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]; expected one of {sorted(_SECTIONS)}")
    for name, factory in _SECTIONS.items():
        base = factory()
        known = {f.name: f for f in fields(base)}
        values = {}
        if cp.has_section(name):
            for key, raw in cp.items(name):
                if key not in known:
                    raise ConfigError(f"unknown key {name}.{key}; expected one of {sorted(known)}")
                f = known[key]
                try:
                    values[key] = _converter(getattr(base, key), f.type)(raw)
                except ValueError as exc:
                    raise ConfigError(f"{name}.{key}: cannot parse {raw!r} ({exc})") from exc
        sections[name] = dataclasses.replace(base, **values)
    cfg = ExperimentConfig(**sections)
    validate(cfg)
    return cfg


def _require(cond, where, msg):
    if not cond:
        raise ConfigError(f"{where}: {msg}")


def validate(cfg):
    try:
        Grid(cfg.grid.N, cfg.grid.L)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    d = cfg.datum
    _require(d.family in FAMILIES, "datum.family", f"must be one of {FAMILIES}")
    _require(d.width > 0, "datum.width", "must be positive")
    _require(d.family != "soliton" or d.c > 0, "datum.c", "soliton speed must be positive")
    _require(d.family != "file" or d.path, "datum.path", "required for family=file")
    s = cfg.solver
    _require(s.dt > 0, "solver.dt", "must be positive")
    _require(s.T > 0, "solver.T", "must be positive")
    _require(s.stride >= 1, "solver.stride", "must be >= 1")
    _require(s.cfl > 0, "solver.cfl", "must be positive")
    _require(all(0 <= t <= s.T for t in s.checkpoint_times), "solver.checkpoint_times",
             "must lie in [0, T]")
    a = cfg.analytics
    k_max = math.pi * cfg.grid.N / cfg.grid.L
    _require(all(x >= 0 for x in a.sigmas), "analytics.sigmas", "must be >= 0")
    _require(max(a.sigmas + (a.sigma0,)) * k_max <= 700, "analytics.sigmas",
             f"sigma*k_max exceeds 700 (largest admissible sigma {700 / k_max:.6g})")
    _require(a.sigma0 > 0, "analytics.sigma0", "must be positive")
    _require(a.sweep_lo <= a.sweep_hi, "analytics.sweep_lo", "must not exceed sweep_hi")
    _require(a.delta is None or a.delta > 0, "analytics.delta", "must be positive")
    _require(a.steps_per_delta >= 2, "analytics.steps_per_delta", "must be >= 2")
    if a.band_lo is not None and a.band_hi is not None:
        _require(a.band_lo < a.band_hi, "analytics.band_lo", "must be below band_hi")
    sc = cfg.scheduler
    _require(sc.c0 > 0, "scheduler.c0", "must be positive")
    _require(sc.r > 1, "scheduler.r", "must exceed 1")
    _require(sc.C > 0, "scheduler.C", "must be positive")
    _require(sc.T > 0, "scheduler.T", "must be positive")
    _require(sc.A0 is None or sc.A0 > 0, "scheduler.A0", "must be positive")
    sy = cfg.symbol
    _require(sy.samples >= 1, "symbol.samples", "must be >= 1")
    _require(sy.xi_low <= sy.xi_high, "symbol.xi_low", "must not exceed xi_high")
    _require(sy.sigma_max > 0, "symbol.sigma_max", "must be positive")
    _require(all(0 <= t <= 1 for t in sy.thetas), "symbol.thetas", "must lie in [0, 1]")
    _require(sy.order in ("rd", "nd"), "symbol.order", "must be 'rd' or 'nd'")
    return cfg
