"""
Pulse dynamics for qdstack.

Modules:
    integrators: RK4 and exact-propagator steppers, EvolutionTrace
    rabi: Closed-form two-level Rabi formulas and detuning cancellation
    vee: Three-level Vee leakage dynamics
"""

from qdstack.dynamics.integrators import (
    EvolutionTrace,
    integrate_rk4,
    propagate_exact,
    rk4_step,
    step_count,
)
from qdstack.dynamics.rabi import (
    TwoLevelPulse,
    cancellation_detuning,
    cancellation_error,
    generalized_rabi,
    pi_pulse_duration,
    two_level_population,
)
from qdstack.dynamics.vee import DEFAULT_STEPS_PER_SWITCH, VeeSpec, evolve_two_level, evolve_vee

__all__ = [
    "DEFAULT_STEPS_PER_SWITCH",
    "EvolutionTrace",
    "TwoLevelPulse",
    "VeeSpec",
    "cancellation_detuning",
    "cancellation_error",
    "evolve_two_level",
    "evolve_vee",
    "generalized_rabi",
    "integrate_rk4",
    "pi_pulse_duration",
    "propagate_exact",
    "rk4_step",
    "step_count",
    "two_level_population",
]
