"""
Single-dot ground states and effective g-factors.

Two confinement models are provided:

* a flat disk dot: finite square well of half-width ``d`` along z with
  energy-dependent masses and BenDaniel-Duke matching, plus a Gaussian
  lateral envelope that adds a zero-point term to the confinement energy;
* a sphere of well material embedded in barrier material, whose g-factor
  is the envelope-weighted average plus an interface term.

Main Functions:
    solve_well: Even-parity ground state of the z well
    dot_ground_energy: Total confinement energy E_k
    dot_g: Envelope-weighted g_zz of a disk dot
    sphere_g: g-factor of a spherical dot with its term decomposition

Example:
    >>> from qdstack.physics.dots import DotGeometry, dot_g
    >>> from qdstack.physics.materials import DEFAULT_MATERIALS
    >>> geo = DotGeometry(4.0, 10.0, DEFAULT_MATERIALS["InAs"], DEFAULT_MATERIALS["GaAs"])
    >>> -14.9 < dot_g(geo) < -0.44
    True
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

import numpy as np
import pandas as pd
from scipy import optimize

from qdstack.exceptions import NumericalError, ParameterError, UnboundStateError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants
from qdstack.physics.materials import MaterialParams, band_offset, bulk_g, eff_mass, roth_g

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-12
ROOT_MAXITER = 200
BARELY_BOUND_FRACTION = 1e-3


class EnergyReference(str, Enum):
    """Where the barrier g-factor energy is measured from."""

    OWN_BAND_EDGE = "own_band_edge"
    BARRIER_EDGE = "barrier_edge"


@dataclass(frozen=True)
class DotGeometry:
    """Dimensions and materials of one disk-shaped dot.

    Attributes:
        half_width_d: Half of the well width along z (nm).
        lateral_d_lt: Lateral extension (nm); ``math.inf`` removes lateral confinement.
        well_material: Dot material.
        barrier_material: Surrounding material.
    """

    half_width_d: float
    lateral_d_lt: float
    well_material: MaterialParams
    barrier_material: MaterialParams

    def __post_init__(self) -> None:
        if not (math.isfinite(self.half_width_d) and self.half_width_d > 0):
            raise ParameterError(f"half_width_d must be > 0, got {self.half_width_d}")
        if not self.lateral_d_lt > 0:
            raise ParameterError(f"lateral_d_lt must be > 0, got {self.lateral_d_lt}")

    @property
    def band_offset(self) -> float:
        return band_offset(self.well_material, self.barrier_material)


@dataclass(frozen=True)
class WellSolution:
    """Even ground state of the z well.

    Attributes:
        E_z: Bound-state energy above the well band edge (meV).
        k: Interior wavenumber (1/nm).
        kappa: Barrier decay constant (1/nm).
        w_A: Probability inside the well.
        w_B: Probability in the barrier.
        barely_bound: True when E_z sits within a small fraction of the offset.
    """

    E_z: float
    k: float
    kappa: float
    w_A: float
    w_B: float
    barely_bound: bool = False


def _wavenumber(material: MaterialParams, E: float, constants: PhysicalConstants) -> float:
    return math.sqrt(eff_mass(material, E) * E / constants.hbar2_over_2m0)


def _decay_constant(
    material: MaterialParams, E: float, offset: float, constants: PhysicalConstants
) -> float:
    return math.sqrt(eff_mass(material, E) * max(offset - E, 0.0) / constants.hbar2_over_2m0)


def _bisect(func: Callable[[float], float], lo: float, hi: float, what: str) -> float:
    """scipy bisection with qdstack errors and the diagnostic bracket."""
    try:
        return float(optimize.bisect(func, lo, hi, xtol=ROOT_XTOL, maxiter=ROOT_MAXITER))
    except ValueError as exc:
        raise NumericalError(
            f"{what}: root not bracketed on [{lo:.6g}, {hi:.6g}] meV "
            f"(f = {func(lo):.3g}, {func(hi):.3g})"
        ) from exc
    except RuntimeError as exc:
        raise NumericalError(f"{what}: bisection did not converge on [{lo:.6g}, {hi:.6g}]") from exc


def _phase_limit_energy(
    material: MaterialParams, length: float, phase: float, ceiling: float,
    constants: PhysicalConstants,
) -> float:
    """Smallest energy in (0, ceiling] where k(E)·length reaches ``phase``, else ceiling."""
    target = constants.hbar2_over_2m0 * (phase / length) ** 2
    if eff_mass(material, ceiling) * ceiling <= target:
        return ceiling
    upper = min(ceiling, target / material.m_band_edge)
    return _bisect(lambda E: eff_mass(material, E) * E - target, 0.0, upper, "phase limit")


# =============================================================================
# Finite Square Well (z confinement)
# =============================================================================


def matching_residual(
    geometry: DotGeometry, E: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """BenDaniel-Duke residual (k/m_A)·tan(k·d) - κ/m_B at energy E."""
    well, barrier = geometry.well_material, geometry.barrier_material
    k = _wavenumber(well, E, constants)
    kappa = _decay_constant(barrier, E, geometry.band_offset, constants)
    return k / eff_mass(well, E) * math.tan(k * geometry.half_width_d) - kappa / eff_mass(
        barrier, E
    )


def solve_well(
    geometry: DotGeometry, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> WellSolution:
    """
    Solve the even ground state of the finite well along z.

    The root is found on the pole-free form
    ``(k/m_A)·sin(kd) - (κ/m_B)·cos(kd)``, which is negative at E = 0 and
    positive once ``kd`` reaches π/2 or E reaches the offset.

    Args:
        geometry: Dot geometry; only the z half-width and materials are used.
        constants: Physical constants.

    Returns:
        WellSolution with weights from the closed-form |f_z|² integrals.

    Raises:
        ParameterError: If the band offset is not positive.
        NumericalError: If bracketing or bisection fails.
    """
    offset = geometry.band_offset
    if not offset > 0:
        raise ParameterError(
            f"band offset {geometry.barrier_material.name}/{geometry.well_material.name} "
            f"must be > 0, got {offset}"
        )
    well, barrier = geometry.well_material, geometry.barrier_material
    d = geometry.half_width_d

    def pole_free(E: float) -> float:
        k = _wavenumber(well, E, constants)
        kappa = _decay_constant(barrier, E, offset, constants)
        return k / eff_mass(well, E) * math.sin(k * d) - kappa / eff_mass(barrier, E) * math.cos(
            k * d
        )

    E_hi = _phase_limit_energy(well, d, math.pi / 2.0, offset, constants)
    E_z = _bisect(pole_free, 0.0, E_hi, f"well d={d} nm")

    k = _wavenumber(well, E_z, constants)
    kappa = _decay_constant(barrier, E_z, offset, constants)
    if kappa == 0.0:
        raise NumericalError(f"well d={d} nm: ground state at the barrier edge")

    inside = d + math.sin(2.0 * k * d) / (2.0 * k)
    outside = math.cos(k * d) ** 2 / kappa
    w_A = inside / (inside + outside)
    barely_bound = (offset - E_z) < BARELY_BOUND_FRACTION * offset
    if barely_bound:
        logger.warning(
            "[WARN] well d=%.4g nm is barely bound (E_z=%.6g of %.6g meV)", d, E_z, offset
        )

    return WellSolution(
        E_z=E_z, k=k, kappa=kappa, w_A=w_A, w_B=1.0 - w_A, barely_bound=barely_bound
    )


def lateral_energy(
    geometry: DotGeometry, E_z: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """
    Zero-point energy of the Gaussian lateral envelope, 2ħ²ω_lt/m_A(E_z).

    ω_lt = π/(8·d_lt²) (1/nm²).
    """
    if math.isinf(geometry.lateral_d_lt):
        return 0.0
    omega_lt = math.pi / (8.0 * geometry.lateral_d_lt**2)
    return 4.0 * constants.hbar2_over_2m0 * omega_lt / eff_mass(geometry.well_material, E_z)


def dot_ground_energy(
    geometry: DotGeometry,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    solution: WellSolution | None = None,
) -> float:
    """Total confinement energy E_k = E_z + lateral term (meV)."""
    solution = solution or solve_well(geometry, constants)
    return solution.E_z + lateral_energy(geometry, solution.E_z, constants)


def dot_g(
    geometry: DotGeometry,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    solution: WellSolution | None = None,
    energy_reference: EnergyReference = EnergyReference.OWN_BAND_EDGE,
) -> float:
    """
    Envelope-weighted g_zz of a disk dot.

    g_zz = g0 + w_A·(g_A(E_z) - g0) + w_B·(g_B(E_B) - g0), where E_B is E_z for
    the own-band-edge reference and E_z - ΔE_c for the barrier-edge reference.
    The lateral envelope is taken to lie entirely in the well material. The
    weights of ``solution`` are normalised first, so an unnormalised envelope
    gives the same g.
    """
    solution = solution or solve_well(geometry, constants)
    total = solution.w_A + solution.w_B
    if not total > 0:
        raise ParameterError(f"envelope weights must have a positive sum, got {total}")
    w_A, w_B = solution.w_A / total, solution.w_B / total
    g_A = bulk_g(geometry.well_material, solution.E_z, constants)
    if energy_reference is EnergyReference.BARRIER_EDGE:
        g_B = roth_g(geometry.barrier_material, solution.E_z - geometry.band_offset, constants)
    else:
        g_B = bulk_g(geometry.barrier_material, solution.E_z, constants)
    g0 = constants.g0
    return g0 + w_A * (g_A - g0) + w_B * (g_B - g0)


def sweep_half_widths(
    well: MaterialParams,
    barrier: MaterialParams,
    lateral_d_lt: float,
    half_widths: Iterable[float],
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> pd.DataFrame:
    """
    Tabulate E_z, E_k, w_A and g over a list of half-widths.

    Returns:
        DataFrame with columns half_width_nm, E_z_meV, E_k_meV, w_A, g.
    """
    rows = []
    for d in half_widths:
        geometry = DotGeometry(float(d), lateral_d_lt, well, barrier)
        solution = solve_well(geometry, constants)
        rows.append(
            {
                "half_width_nm": float(d),
                "E_z_meV": solution.E_z,
                "E_k_meV": dot_ground_energy(geometry, constants, solution),
                "w_A": solution.w_A,
                "g": dot_g(geometry, constants, solution),
            }
        )
    return pd.DataFrame(rows, columns=["half_width_nm", "E_z_meV", "E_k_meV", "w_A", "g"])


# =============================================================================
# Spherical Dot
# =============================================================================


@dataclass(frozen=True)
class SphereGFactor:
    """Term decomposition of the spherical-dot g-factor.

    ``g = g0 + term_A + term_B + term_surface`` where
    term_A = (g_A - g0)·w_A, term_B = (g_B - g0)·w_B and
    term_surface = (g_B - g_A)·V(R)·f²(R).
    """

    radius: float
    E: float
    q: float
    kappa: float
    w_A: float
    w_B: float
    surface_weight: float
    g_A: float
    g_B: float
    term_A: float
    term_B: float
    term_surface: float
    g: float


def sphere_g(
    R: float,
    well: MaterialParams,
    barrier: MaterialParams,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> SphereGFactor:
    """
    g-factor of the s-like ground state of a spherical dot.

    Inside, f ∝ sin(qr)/r; outside, f ∝ exp(-κr)/r. Matching f and f'/m at R
    gives ``qR·cot(qR) = 1 - (m_A/m_B)(1 + κR)``, solved in the pole-free form
    ``cos(qR) - [1 - (m_A/m_B)(1 + κR)]·sin(qR)/(qR)``.

    Args:
        R: Dot radius (nm).
        well: Dot material A.
        barrier: Matrix material B.
        constants: Physical constants.

    Returns:
        SphereGFactor with weights, the four terms and the total.

    Raises:
        ParameterError: If R <= 0 or the offset is not positive.
        UnboundStateError: If no s-state is bound.
    """
    if not (math.isfinite(R) and R > 0):
        raise ParameterError(f"radius must be > 0, got {R}")
    offset = band_offset(well, barrier)
    if not offset > 0:
        raise ParameterError(f"band offset {barrier.name}/{well.name} must be > 0, got {offset}")

    def matching(E: float) -> float:
        q = _wavenumber(well, E, constants)
        kappa = _decay_constant(barrier, E, offset, constants)
        ratio = eff_mass(well, E) / eff_mass(barrier, E)
        # np.sinc is sin(πx)/(πx)
        sinc = float(np.sinc(q * R / math.pi))
        return math.cos(q * R) - (1.0 - ratio * (1.0 + kappa * R)) * sinc

    E_hi = _phase_limit_energy(well, R, math.pi, offset, constants)
    if matching(E_hi) >= 0.0:
        raise UnboundStateError(
            f"no bound s-state for R={R} nm in {well.name}/{barrier.name} "
            f"(offset {offset} meV)"
        )
    E = _bisect(matching, 0.0, E_hi, f"sphere R={R} nm")

    q = _wavenumber(well, E, constants)
    kappa = _decay_constant(barrier, E, offset, constants)
    sin_qR = math.sin(q * R)
    inside = R / 2.0 - math.sin(2.0 * q * R) / (4.0 * q)
    outside = sin_qR**2 / (2.0 * kappa)
    norm = inside + outside
    w_A = inside / norm
    w_B = outside / norm
    surface_weight = R * sin_qR**2 / (3.0 * norm)

    g0 = constants.g0
    g_A = bulk_g(well, E, constants)
    g_B = bulk_g(barrier, E, constants)
    term_A = (g_A - g0) * w_A
    term_B = (g_B - g0) * w_B
    term_surface = (g_B - g_A) * surface_weight
    return SphereGFactor(
        radius=R,
        E=E,
        q=q,
        kappa=kappa,
        w_A=w_A,
        w_B=w_B,
        surface_weight=surface_weight,
        g_A=g_A,
        g_B=g_B,
        term_A=term_A,
        term_B=term_B,
        term_surface=term_surface,
        g=g0 + term_A + term_B + term_surface,
    )
