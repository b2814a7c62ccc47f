"""Spectral solver and Gevrey-analyticity diagnostics for the periodic quartic KdV equation."""

__version__ = "0.1.0"

from .spectral import (
    Grid,
    OverflowGuardError,
    RealField,
    SpectralField,
    forward,
    inverse,
    make_grid,
)
from .solver import SolverAbort, SolverConfig, Trajectory, evolve, invariants
from .data import make_datum, soliton_profile
from .gevrey import (
    BourgainParams,
    SpaceTimeField,
    bourgain_norm,
    estimate_radius,
    gevrey_norm,
    probe_multilinear,
)
from .conservation import delta_energy, energy_identity_residual, sigma_sweep
from .scheduler import make_plan, plan_for_datum, verify_induction
from .symbol import check_symbol_bound, fuzz

__all__ = [
    "BourgainParams",
    "Grid",
    "OverflowGuardError",
    "RealField",
    "SolverAbort",
    "SolverConfig",
    "SpaceTimeField",
    "SpectralField",
    "Trajectory",
    "bourgain_norm",
    "check_symbol_bound",
    "delta_energy",
    "energy_identity_residual",
    "estimate_radius",
    "evolve",
    "forward",
    "fuzz",
    "gevrey_norm",
    "invariants",
    "inverse",
    "make_datum",
    "make_grid",
    "make_plan",
    "plan_for_datum",
    "probe_multilinear",
    "sigma_sweep",
    "soliton_profile",
    "verify_induction",
]
