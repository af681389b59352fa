"""
Bulk band models for III-V conduction electrons.

The g-factor follows the three-band Roth form with an additive remote-band
correction, and the effective mass follows the matching Kane
nonparabolicity, rescaled so that ``m(0)`` equals the band-edge mass.

Main Functions:
    bulk_g: Energy-dependent bulk g-factor
    eff_mass: Energy-dependent effective mass
    get_material: Look up a default or overridden material by name

Example:
    >>> from qdstack.physics.materials import DEFAULT_MATERIALS, bulk_g
    >>> round(bulk_g(DEFAULT_MATERIALS["GaAs"], 0.0), 2)
    -0.44
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Mapping

from qdstack.exceptions import ParameterError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants


@dataclass(frozen=True)
class MaterialParams:
    """Band parameters of one semiconductor.

    Attributes:
        name: Identifier used in configs and reports.
        E_g: Band gap (meV).
        Delta_so: Spin-orbit splitting (meV).
        E_P: Kane energy (meV).
        g_remote: Remote-band additive g correction.
        DeltaE_c: Conduction-band edge on a common reference (meV). The
            offset of a well/barrier pair is ``barrier.DeltaE_c - well.DeltaE_c``.
        m_band_edge: Band-edge effective mass (units of m0).
    """

    name: str
    E_g: float
    Delta_so: float
    E_P: float
    g_remote: float
    DeltaE_c: float
    m_band_edge: float

    def __post_init__(self) -> None:
        if not self.E_g > 0:
            raise ParameterError(f"{self.name}: E_g must be > 0, got {self.E_g}")
        if not self.Delta_so >= 0:
            raise ParameterError(f"{self.name}: Delta_so must be >= 0, got {self.Delta_so}")
        if not self.E_P >= 0:
            raise ParameterError(f"{self.name}: E_P must be >= 0, got {self.E_P}")
        if not self.m_band_edge > 0:
            raise ParameterError(f"{self.name}: m_band_edge must be > 0, got {self.m_band_edge}")
        for attr in ("g_remote", "DeltaE_c"):
            if not math.isfinite(getattr(self, attr)):
                raise ParameterError(f"{self.name}: {attr} must be finite")

    @classmethod
    def calibrated(
        cls,
        name: str,
        E_g: float,
        Delta_so: float,
        E_P: float,
        m_band_edge: float,
        bulk_g0: float,
        DeltaE_c: float = 0.0,
        constants: PhysicalConstants = DEFAULT_CONSTANTS,
    ) -> MaterialParams:
        """
        Build a material whose ``g_remote`` reproduces a measured band-edge g-factor.

        Args:
            bulk_g0: Target value of ``bulk_g(material, 0)``.

        Returns:
            MaterialParams with the calibrated remote-band correction.
        """
        g_remote = bulk_g0 - constants.g0 + _kane_g_term(E_g, Delta_so, E_P, 0.0)
        return cls(
            name=name,
            E_g=E_g,
            Delta_so=Delta_so,
            E_P=E_P,
            g_remote=g_remote,
            DeltaE_c=DeltaE_c,
            m_band_edge=m_band_edge,
        )

    def with_overrides(
        self, overrides: Mapping[str, Any], constants: PhysicalConstants = DEFAULT_CONSTANTS
    ) -> MaterialParams:
        """
        Return a copy with some fields replaced.

        A ``bulk_g0`` key recalibrates ``g_remote`` against the updated band
        parameters instead of being stored.
        """
        values = {key: value for key, value in overrides.items() if key != "bulk_g0"}
        unknown = set(values) - {item.name for item in dataclasses.fields(self)}
        if unknown:
            raise ParameterError(f"{self.name}: unknown material fields {sorted(unknown)}")
        updated = dataclasses.replace(self, **values)
        if "bulk_g0" in overrides:
            updated = MaterialParams.calibrated(
                name=updated.name,
                E_g=updated.E_g,
                Delta_so=updated.Delta_so,
                E_P=updated.E_P,
                m_band_edge=updated.m_band_edge,
                bulk_g0=float(overrides["bulk_g0"]),
                DeltaE_c=updated.DeltaE_c,
                constants=constants,
            )
        return updated


# =============================================================================
# Band Formulas
# =============================================================================


def _kane_g_term(E_g: float, Delta_so: float, E_P: float, E: float) -> float:
    """Spin-orbit (Kane) contribution (2E_P/3)[1/(E_g+E) - 1/(E_g+E+Δso)]."""
    return (2.0 * E_P / 3.0) * (1.0 / (E_g + E) - 1.0 / (E_g + E + Delta_so))


def _kane_mass_factor(material: MaterialParams, E: float) -> float:
    return 1.0 + (material.E_P / 3.0) * (
        2.0 / (material.E_g + E) + 1.0 / (material.E_g + E + material.Delta_so)
    )


def roth_g(
    material: MaterialParams, E: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """
    Roth g-factor without the ``E >= 0`` precondition.

    Used for energies measured below a band edge (barrier-edge reference).
    Only ``E_g + E > 0`` is required.
    """
    if not material.E_g + E > 0:
        raise ParameterError(f"{material.name}: E_g + E must be > 0 (E = {E} meV)")
    value = (
        constants.g0
        + material.g_remote
        - _kane_g_term(material.E_g, material.Delta_so, material.E_P, E)
    )
    if not math.isfinite(value):
        raise ParameterError(f"{material.name}: non-finite g-factor at E = {E} meV")
    return value


def bulk_g(
    material: MaterialParams, E: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """
    Bulk conduction-electron g-factor at kinetic energy E above the band edge.

    Args:
        material: Band parameters.
        E: Energy above the conduction-band edge (meV), must be >= 0.
        constants: Physical constants (for g0).

    Returns:
        Dimensionless g-factor, increasing in E.

    Raises:
        ParameterError: If E < 0 or the result is not finite.
    """
    if not E >= 0:
        raise ParameterError(f"energy must be >= 0, got {E}")
    return roth_g(material, E, constants)


def eff_mass(material: MaterialParams, E: float) -> float:
    """
    Energy-dependent effective mass, m(E) = m_be · K(0) / K(E).

    ``K(E) = 1 + (E_P/3)(2/(E_g+E) + 1/(E_g+E+Δso))``; K decreases with E, so
    the mass is non-decreasing.

    Raises:
        ParameterError: If E < 0.
    """
    if not E >= 0:
        raise ParameterError(f"energy must be >= 0, got {E}")
    return material.m_band_edge * _kane_mass_factor(material, 0.0) / _kane_mass_factor(material, E)


# =============================================================================
# Default Material Table
# =============================================================================

DEFAULT_MATERIALS: dict[str, MaterialParams] = {
    "InAs": MaterialParams.calibrated(
        "InAs", E_g=418.0, Delta_so=380.0, E_P=21500.0, m_band_edge=0.023,
        bulk_g0=-14.9, DeltaE_c=0.0,
    ),
    "GaAs": MaterialParams.calibrated(
        "GaAs", E_g=1519.0, Delta_so=341.0, E_P=28900.0, m_band_edge=0.067,
        bulk_g0=-0.44, DeltaE_c=450.0,
    ),
    # Al0.35Ga0.65As, 262 meV above the GaAs conduction edge
    "AlGaAs35": MaterialParams.calibrated(
        "AlGaAs35", E_g=1955.0, Delta_so=320.0, E_P=26100.0, m_band_edge=0.096,
        bulk_g0=0.5, DeltaE_c=712.0,
    ),
}


def get_material(
    name: str, materials: Mapping[str, MaterialParams] | None = None
) -> MaterialParams:
    """Look up a material by name, raising ParameterError with the known names."""
    table = DEFAULT_MATERIALS if materials is None else materials
    try:
        return table[name]
    except KeyError:
        raise ParameterError(f"unknown material '{name}'. Known: {sorted(table)}") from None


def band_offset(well: MaterialParams, barrier: MaterialParams) -> float:
    """Conduction-band offset of a well/barrier pair (meV)."""
    return barrier.DeltaE_c - well.DeltaE_c
