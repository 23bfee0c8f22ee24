"""Partial-wave solvers for the radial problem."""
from __future__ import annotations

from .farfield import FarField, outgoing_far_field
from .fields import PartialWaveField, field_from_function
from .jost import JostReport, jost_scan, shooting_energy
from .modes import ModePair, solve_modes
from .operators import angular_form, apply_a_inv_p_r, apply_p_r
from .resolvent import apply_resolvent, residual

__all__ = [
    "FarField", "JostReport", "ModePair", "PartialWaveField", "angular_form", "apply_a_inv_p_r",
    "apply_p_r", "apply_resolvent", "field_from_function", "jost_scan", "outgoing_far_field", "residual",
    "shooting_energy", "solve_modes",
]
