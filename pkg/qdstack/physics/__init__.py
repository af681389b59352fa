"""
Single-dot physics for qdstack.

Modules:
    constants: PhysicalConstants in meV / ps / nm / tesla units
    materials: Bulk band models (Roth g-factor, Kane mass) and default materials
    dots: Finite-well and spherical-dot ground states and effective g-factors
"""

from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants
from qdstack.physics.dots import (
    DotGeometry,
    EnergyReference,
    SphereGFactor,
    WellSolution,
    dot_g,
    dot_ground_energy,
    lateral_energy,
    matching_residual,
    solve_well,
    sphere_g,
    sweep_half_widths,
)
from qdstack.physics.materials import (
    DEFAULT_MATERIALS,
    MaterialParams,
    band_offset,
    bulk_g,
    eff_mass,
    get_material,
)

__all__ = [
    "DEFAULT_CONSTANTS",
    "DEFAULT_MATERIALS",
    "DotGeometry",
    "EnergyReference",
    "MaterialParams",
    "PhysicalConstants",
    "SphereGFactor",
    "WellSolution",
    "band_offset",
    "bulk_g",
    "dot_g",
    "dot_ground_energy",
    "eff_mass",
    "get_material",
    "lateral_energy",
    "matching_residual",
    "solve_well",
    "sphere_g",
    "sweep_half_widths",
]
