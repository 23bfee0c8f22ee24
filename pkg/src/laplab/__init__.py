"""Numerical verification of limiting absorption, radiation and Rellich bounds
for radial Schroedinger operators with slowly decaying attractive potentials."""
from __future__ import annotations

from .efftime import EffTimeTable, SpectralParam, beta_c, build_efftime, check_tau_S_bounds, phase_b
from .errors import (ConfigError, DomainError, LapLabError, NumericalAccuracyError, OutOfRangeError,
                     PlanError, ResonanceError)
from .grid import RadialGrid
from .norms import decompose_radius, decompose_tau, norm_B, norm_Bstar, tail_profile
from .potential import PotentialSpec, list_presets, load_preset, soft_power, verify_assumptions
from .radial import PartialWaveField, apply_resolvent, jost_scan, solve_modes

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DomainError", "EffTimeTable", "LapLabError", "NumericalAccuracyError",
    "OutOfRangeError", "PartialWaveField", "PlanError", "PotentialSpec", "RadialGrid", "ResonanceError",
    "SpectralParam", "__version__", "apply_resolvent", "beta_c", "build_efftime", "check_tau_S_bounds",
    "decompose_radius", "decompose_tau", "jost_scan", "list_presets", "load_preset", "norm_B",
    "norm_Bstar", "phase_b", "soft_power", "solve_modes", "tail_profile", "verify_assumptions",
]
