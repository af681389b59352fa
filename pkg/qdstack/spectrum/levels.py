"""
Zeeman-split single-electron spectrum of a dot stack.

Spin index i = 0 is up and i = 1 is down, so that
``E_{i,k} = E_k + (-1)^i μ_B g_k B / 2`` and E(up) - E(down) = μ_B g_k B.

Main Functions:
    level_table: Build the 2N levels of a StackDesign
    transition_energy: ΔE_{ijkl} = E_{i,k} - E_{j,l}
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import pandas as pd

from qdstack.exceptions import ParameterError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants
from qdstack.physics.dots import DotGeometry, dot_g, dot_ground_energy, solve_well
from qdstack.physics.materials import MaterialParams

DEFAULT_B_TESLA = 10.0
DEFAULT_B1_TESLA = 0.1
DEFAULT_TSW_PS = 10.0

SPINS = (0, 1)


@dataclass(frozen=True)
class StackDesign:
    """An ordered stack of dots with its static field and pulse timing.

    Attributes:
        dots: Dot geometries, index k from the bottom of the stack.
        B: Static field along z (T).
        B1: Rotational-field amplitude (T).
        T_sw: Switching time of one optical π pulse (ps).
    """

    dots: tuple[DotGeometry, ...]
    B: float = DEFAULT_B_TESLA
    B1: float = DEFAULT_B1_TESLA
    T_sw: float = DEFAULT_TSW_PS

    def __post_init__(self) -> None:
        object.__setattr__(self, "dots", tuple(self.dots))
        if not self.dots:
            raise ParameterError("a stack needs at least one dot")
        if not self.B >= 0:
            raise ParameterError(f"B must be >= 0, got {self.B}")
        if not self.B1 >= 0:
            raise ParameterError(f"B1 must be >= 0, got {self.B1}")
        if not self.T_sw > 0:
            raise ParameterError(f"T_sw must be > 0, got {self.T_sw}")

    @classmethod
    def from_half_widths(
        cls,
        half_widths: Sequence[float],
        lateral_d_lt: float,
        well: MaterialParams,
        barrier: MaterialParams,
        B: float = DEFAULT_B_TESLA,
        B1: float = DEFAULT_B1_TESLA,
        T_sw: float = DEFAULT_TSW_PS,
    ) -> StackDesign:
        dots = tuple(DotGeometry(float(d), lateral_d_lt, well, barrier) for d in half_widths)
        return cls(dots=dots, B=B, B1=B1, T_sw=T_sw)

    @property
    def n_dots(self) -> int:
        return len(self.dots)

    @property
    def half_widths(self) -> list[float]:
        return [dot.half_width_d for dot in self.dots]


class Transition(NamedTuple):
    """A same-spin hop of spin ``spin`` from dot k to dot l, energy ΔE_{iikl} (meV)."""

    spin: int
    k: int
    l: int
    energy: float

    @property
    def label(self) -> str:
        return f"C{self.spin}{self.spin}({self.k}-{self.l})"


@dataclass(frozen=True, eq=False)
class SpinLevelTable:
    """The 2N single-electron levels of a stack.

    Attributes:
        levels: Array of shape (2, N); ``levels[i, k]`` = E_{i,k} (meV).
        g_values: g_k per dot.
        quantization_energies: E_k per dot (meV).
        B: Static field the levels were built for (T).
    """

    levels: np.ndarray
    g_values: np.ndarray
    quantization_energies: np.ndarray
    B: float
    constants: PhysicalConstants = field(default=DEFAULT_CONSTANTS, repr=False)

    @classmethod
    def from_arrays(
        cls,
        quantization_energies: Sequence[float] | np.ndarray,
        g_values: Sequence[float] | np.ndarray,
        B: float,
        constants: PhysicalConstants = DEFAULT_CONSTANTS,
    ) -> SpinLevelTable:
        """Build the table directly from E_k and g_k without dot physics."""
        E_k = np.asarray(quantization_energies, dtype=float)
        g = np.asarray(g_values, dtype=float)
        if E_k.ndim != 1 or E_k.shape != g.shape or E_k.size == 0:
            raise ParameterError(
                "quantization energies and g values must be equal-length 1D arrays"
            )
        if not B >= 0:
            raise ParameterError(f"B must be >= 0, got {B}")
        half_split = constants.mu_B * g * B / 2.0
        levels = np.vstack([E_k + half_split, E_k - half_split])
        return cls(levels=levels, g_values=g, quantization_energies=E_k, B=B, constants=constants)

    @property
    def n_dots(self) -> int:
        return int(self.quantization_energies.size)

    def energy(self, spin: int, dot: int) -> float:
        _check_spin(spin)
        self._check_dot(dot)
        return float(self.levels[spin, dot])

    def zeeman_splitting(self, dot: int) -> float:
        """E_{0,k} - E_{1,k} = μ_B g_k B."""
        self._check_dot(dot)
        return float(self.levels[0, dot] - self.levels[1, dot])

    def adjacent_transitions(self) -> list[Transition]:
        """Same-spin transitions between neighbouring dots, ordered as (k-l, spin)."""
        transitions = []
        for k in range(self.n_dots - 1):
            for spin in SPINS:
                energy = float(self.levels[spin, k] - self.levels[spin, k + 1])
                transitions.append(Transition(spin, k, k + 1, energy))
        return transitions

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "dot": np.arange(self.n_dots),
                "E_k_meV": self.quantization_energies,
                "g": self.g_values,
                "E_up_meV": self.levels[0],
                "E_down_meV": self.levels[1],
            }
        )

    def _check_dot(self, dot: int) -> None:
        if not 0 <= dot < self.n_dots:
            raise ParameterError(f"dot index {dot} out of range for {self.n_dots} dots")


def _check_spin(spin: int) -> None:
    if spin not in SPINS:
        raise ParameterError(f"spin index must be 0 or 1, got {spin}")


def level_table(
    stack: StackDesign, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> SpinLevelTable:
    """
    Build the Zeeman-split levels of every dot in the stack.

    Args:
        stack: Stack geometry and static field.
        constants: Physical constants.

    Returns:
        SpinLevelTable with levels[i, k] = E_k + (-1)^i μ_B g_k B / 2.
    """
    E_k = []
    g = []
    for dot in stack.dots:
        solution = solve_well(dot, constants)
        E_k.append(dot_ground_energy(dot, constants, solution))
        g.append(dot_g(dot, constants, solution))
    return SpinLevelTable.from_arrays(E_k, g, stack.B, constants)


def transition_energy(table: SpinLevelTable, i: int, j: int, k: int, l: int) -> float:
    """ΔE_{ijkl} = E_{i,k} - E_{j,l} (meV)."""
    return table.energy(i, k) - table.energy(j, l)


def zeeman_energy(g: float, B: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Zeeman splitting μ_B·g·B (meV)."""
    value = constants.mu_B * g * B
    if not math.isfinite(value):
        raise ParameterError("non-finite Zeeman energy")
    return value
