"""
Physical constants in the unit system used throughout qdstack.

Energies are in meV, times in ps, lengths in nm, fields in tesla and
masses in units of the free-electron mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from qdstack.exceptions import ParameterError


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants entering the Zeeman, Rabi and confinement formulas.

    Attributes:
        mu_B: Bohr magneton in meV/T.
        hbar: Reduced Planck constant in meV·ps.
        g0: Free-electron Landé factor.
        hbar2_over_2m0: ħ²/(2m₀) in meV·nm², converts wavenumbers to kinetic energy.
    """

    mu_B: float = 0.05788382
    hbar: float = 0.65821196
    g0: float = 2.0
    hbar2_over_2m0: float = 38.09982

    def __post_init__(self) -> None:
        for item in fields(self):
            value = getattr(self, item.name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{item.name} must be finite and > 0, got {value!r}")


DEFAULT_CONSTANTS = PhysicalConstants()
