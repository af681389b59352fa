"""
Stack spectra and selectivity requirements.

Modules:
    levels: StackDesign, SpinLevelTable and transition energies
    selectivity: Rotation and optical selectivity checks
"""

from qdstack.spectrum.levels import (
    DEFAULT_B1_TESLA,
    DEFAULT_B_TESLA,
    DEFAULT_TSW_PS,
    SpinLevelTable,
    StackDesign,
    Transition,
    level_table,
    transition_energy,
    zeeman_energy,
)
from qdstack.spectrum.selectivity import (
    SELECTIVITY_TOLERANCE_MEV,
    SelectivityReport,
    Violation,
    check_optical_selectivity,
    check_optical_transitions,
    check_rotation_selectivity,
    check_rotation_values,
    magnetic_rabi_energy,
    optical_rabi_energy,
)

__all__ = [
    "DEFAULT_B1_TESLA",
    "DEFAULT_B_TESLA",
    "DEFAULT_TSW_PS",
    "SELECTIVITY_TOLERANCE_MEV",
    "SelectivityReport",
    "SpinLevelTable",
    "StackDesign",
    "Transition",
    "Violation",
    "check_optical_selectivity",
    "check_optical_transitions",
    "check_rotation_selectivity",
    "check_rotation_values",
    "level_table",
    "magnetic_rabi_energy",
    "optical_rabi_energy",
    "transition_energy",
    "zeeman_energy",
]
