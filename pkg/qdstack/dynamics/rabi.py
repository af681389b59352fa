"""
Closed-form two-level Rabi dynamics and the 2nπ detuning-cancellation rule.

A rectangular pulse of Rabi energy ħΩ detuned by ħΔ drives the excited
population P(t) = (Ω²/Ω̃²)·sin²(Ω̃t/2) with Ω̃ = √(Ω² + Δ²). Choosing
ħΔ = ħΩ·√(4n² - 1) makes an addressed π pulse (t = π/Ω) a full 2nπ cycle
on the detuned transition, which returns it to its initial state.

Example:
    >>> from qdstack.dynamics.rabi import cancellation_detuning
    >>> round(cancellation_detuning(10.0, 1), 3)
    0.358
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qdstack.exceptions import ParameterError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants


@dataclass(frozen=True)
class TwoLevelPulse:
    """Rectangular pulse on a two-level transition.

    Attributes:
        rabi_energy: ħΩ (meV).
        detuning_energy: ħ(ω₀ - ω) (meV).
        duration: Pulse length (ps); defaults to the resonant π time.
    """

    rabi_energy: float
    detuning_energy: float = 0.0
    duration: float | None = None

    def __post_init__(self) -> None:
        if not self.rabi_energy > 0:
            raise ParameterError(f"rabi_energy must be > 0, got {self.rabi_energy}")
        if self.duration is None:
            object.__setattr__(self, "duration", pi_pulse_duration(self.rabi_energy))
        if not self.duration > 0:
            raise ParameterError(f"duration must be > 0, got {self.duration}")
        if not math.isfinite(self.detuning_energy):
            raise ParameterError("detuning_energy must be finite")


def generalized_rabi(rabi_energy: float, detuning_energy: float) -> float:
    """ħΩ̃ = √((ħΩ)² + (ħΔ)²) (meV)."""
    if not rabi_energy >= 0:
        raise ParameterError(f"rabi_energy must be >= 0, got {rabi_energy}")
    return math.hypot(rabi_energy, detuning_energy)


def pi_pulse_duration(
    rabi_energy: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Resonant π-pulse time πħ/ħΩ (ps)."""
    if not rabi_energy > 0:
        raise ParameterError(f"rabi_energy must be > 0, got {rabi_energy}")
    return math.pi * constants.hbar / rabi_energy


def two_level_population(
    pulse: TwoLevelPulse,
    t: float | np.ndarray,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float | np.ndarray:
    """
    Excited-state probability after driving for time t from the ground state.

    Accepts a scalar or an array of times; values are clipped to [0, 1].
    """
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise ParameterError("time must be >= 0")
    omega_eff = generalized_rabi(pulse.rabi_energy, pulse.detuning_energy)
    amplitude = (pulse.rabi_energy / omega_eff) ** 2
    population = np.clip(
        amplitude * np.sin(omega_eff * times / (2.0 * constants.hbar)) ** 2, 0.0, 1.0
    )
    return float(population) if population.ndim == 0 else population


def cancellation_detuning(
    T_sw: float, n: int, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """
    Detuning that turns an addressed π pulse into a 2nπ cycle of a spectator.

    Args:
        T_sw: Switching (π-pulse) time (ps).
        n: Number of full cycles, >= 1.

    Returns:
        ħΔ = ħΩ·√(4n² - 1) with ħΩ = πħ/T_sw (meV).
    """
    if not T_sw > 0:
        raise ParameterError(f"T_sw must be > 0, got {T_sw}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    rabi = math.pi * constants.hbar / T_sw
    return rabi * math.sqrt(4 * int(n) ** 2 - 1)


def cancellation_error(
    rabi_energy: float, detuning_energy: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Population a detuned spectator keeps after an addressed π pulse."""
    pulse = TwoLevelPulse(rabi_energy, detuning_energy)
    return float(two_level_population(pulse, pi_pulse_duration(rabi_energy, constants), constants))
