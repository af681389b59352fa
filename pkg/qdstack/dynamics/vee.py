"""
Three-level "Vee" leakage dynamics.

Level 1 is coupled to level 2 (the addressed transition) and to level 3
(a detuned spectator) by the same rectangular pulse. In the frame rotating
at the 1→2 drive frequency:

    H = [[0,       ħΩ₁₂/2, ħΩ₁₃/2],
         [ħΩ₁₂/2,  ħΔ₁₂,   0     ],
         [ħΩ₁₃/2,  0,      ħΔ₁₃  ]]

Absolute level energies only enter through the detunings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qdstack.dynamics.integrators import EvolutionTrace, integrate_rk4
from qdstack.dynamics.rabi import TwoLevelPulse, pi_pulse_duration
from qdstack.exceptions import ParameterError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants

# integrator steps per switching time
DEFAULT_STEPS_PER_SWITCH = 2000
VEE_LABELS = ("p1", "p2", "p3")


@dataclass(frozen=True)
class VeeSpec:
    """Parameters of one Vee run.

    Attributes:
        rabi_12: ħΩ₁₂ (meV).
        rabi_13: ħΩ₁₃ (meV); defaults to rabi_12.
        detuning_13: ħΔ₁₃ (meV).
        duration: Pulse length (ps).
        dt: RK4 step (ps); defaults to T_sw/2000 with T_sw the 1→2 π time.
        detuning_12: ħΔ₁₂ (meV).
        sample_every: Record every n-th integration step.
    """

    rabi_12: float
    detuning_13: float
    duration: float
    rabi_13: float | None = None
    dt: float | None = None
    detuning_12: float = 0.0
    sample_every: int = 1

    def __post_init__(self) -> None:
        if not self.rabi_12 > 0:
            raise ParameterError(f"rabi_12 must be > 0, got {self.rabi_12}")
        if self.rabi_13 is None:
            object.__setattr__(self, "rabi_13", self.rabi_12)
        elif not self.rabi_13 >= 0:
            raise ParameterError(f"rabi_13 must be >= 0, got {self.rabi_13}")
        if not self.duration > 0:
            raise ParameterError(f"duration must be > 0, got {self.duration}")
        if self.dt is None:
            object.__setattr__(
                self, "dt", pi_pulse_duration(self.rabi_12) / DEFAULT_STEPS_PER_SWITCH
            )
        if not (self.dt > 0 and self.dt <= self.duration / 100.0):
            raise ParameterError(
                f"dt must satisfy 0 < dt <= duration/100, got dt={self.dt}, "
                f"duration={self.duration}"
            )
        if self.sample_every < 1:
            raise ParameterError("sample_every must be >= 1")

    @classmethod
    def from_switching_time(
        cls,
        T_sw: float,
        detuning_13: float,
        duration: float | None = None,
        rabi_13: float | None = None,
        constants: PhysicalConstants = DEFAULT_CONSTANTS,
    ) -> VeeSpec:
        """Vee run whose 1->2 pulse is a π pulse of length T_sw (ps)."""
        if not T_sw > 0:
            raise ParameterError(f"T_sw must be > 0, got {T_sw}")
        return cls(
            rabi_12=math.pi * constants.hbar / T_sw,
            rabi_13=rabi_13,
            detuning_13=detuning_13,
            duration=T_sw if duration is None else duration,
            dt=T_sw / DEFAULT_STEPS_PER_SWITCH,
        )

    def hamiltonian(self) -> np.ndarray:
        """Rotating-frame Hamiltonian (meV)."""
        half_12 = self.rabi_12 / 2.0
        half_13 = self.rabi_13 / 2.0  # type: ignore[operator]
        return np.array(
            [
                [0.0, half_12, half_13],
                [half_12, self.detuning_12, 0.0],
                [half_13, 0.0, self.detuning_13],
            ]
        )


def evolve_vee(spec: VeeSpec, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> EvolutionTrace:
    """
    Integrate the Vee system from level 1.

    Returns:
        EvolutionTrace with columns p1, p2, p3.

    Raises:
        NumericalError: If the trace drifts by more than 1e-6.
    """
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    return integrate_rk4(
        spec.hamiltonian(),
        psi0,
        spec.duration,
        spec.dt,  # type: ignore[arg-type]
        VEE_LABELS,
        sample_every=spec.sample_every,
        constants=constants,
    )


def evolve_two_level(
    pulse: TwoLevelPulse,
    dt: float | None = None,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> EvolutionTrace:
    """Numerical two-level Rabi problem: the Vee system with level 3 decoupled."""
    spec = VeeSpec(
        rabi_12=pulse.rabi_energy,
        rabi_13=0.0,
        detuning_13=0.0,
        detuning_12=pulse.detuning_energy,
        duration=pulse.duration,
        dt=dt,
    )
    return evolve_vee(spec, constants)
