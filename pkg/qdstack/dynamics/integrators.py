"""
Time integration of the Schrödinger equation for small level systems.

Two steppers share one trace container:

* ``integrate_rk4``: classical fixed-step 4th-order Runge-Kutta, used for
  the analytic cross-checks of the Rabi and Vee problems;
* ``propagate_exact``: matrix-exponential steps (scipy.linalg.expm) for
  piecewise-constant Hamiltonians, used by the pulsed gate simulation.

Hamiltonians are in meV and times in ps; ħ converts between them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import expm

from qdstack.exceptions import NumericalError, ParameterError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants

logger = logging.getLogger(__name__)

TRACE_DRIFT_LIMIT = 1e-6


@dataclass
class EvolutionTrace:
    """Populations sampled on a uniform time grid.

    Attributes:
        times: Sample times (ps).
        populations: Array (n_samples, n_levels) of diagonal density-matrix elements.
        labels: Column name of each level.
        final_state: Complex amplitudes at the last sample.
    """

    times: np.ndarray
    populations: np.ndarray
    labels: tuple[str, ...]
    final_state: np.ndarray | None = field(default=None, repr=False)

    @property
    def final_populations(self) -> np.ndarray:
        return self.populations[-1]

    def column(self, label: str) -> np.ndarray:
        return self.populations[:, self.labels.index(label)]

    def max_trace_error(self) -> float:
        return float(np.max(np.abs(self.populations.sum(axis=1) - 1.0)))

    def to_frame(self) -> pd.DataFrame:
        """CSV-ready frame with a leading ``t_ps`` column."""
        frame = pd.DataFrame(self.populations, columns=list(self.labels))
        frame.insert(0, "t_ps", self.times)
        return frame

    @classmethod
    def concatenate(cls, traces: Sequence[EvolutionTrace]) -> EvolutionTrace:
        """Join consecutive traces, dropping each duplicated start sample."""
        if not traces:
            raise ParameterError("nothing to concatenate")
        times = [traces[0].times]
        pops = [traces[0].populations]
        for trace in traces[1:]:
            times.append(trace.times[1:])
            pops.append(trace.populations[1:])
        return cls(
            times=np.concatenate(times),
            populations=np.vstack(pops),
            labels=traces[0].labels,
            final_state=traces[-1].final_state,
        )


def step_count(duration: float, dt: float) -> int:
    """Number of equal steps covering ``duration`` with step at most ``dt``."""
    if not dt > 0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if not duration >= 0:
        raise ParameterError(f"duration must be >= 0, got {duration}")
    return max(1, math.ceil(duration / dt - 1e-9))


def rk4_step(
    psi: np.ndarray, rhs: Callable[[float, np.ndarray], np.ndarray], t: float, dt: float
) -> np.ndarray:
    """One classical Runge-Kutta step of dψ/dt = rhs(t, ψ)."""
    k1 = rhs(t, psi)
    k2 = rhs(t + dt / 2.0, psi + dt / 2.0 * k1)
    k3 = rhs(t + dt / 2.0, psi + dt / 2.0 * k2)
    k4 = rhs(t + dt, psi + dt * k3)
    return psi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_drift(psi: np.ndarray, t: float) -> None:
    drift = abs(float(np.vdot(psi, psi).real) - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise NumericalError(
            f"trace drift {drift:.3g} at t={t:.6g} ps exceeds {TRACE_DRIFT_LIMIT:g}; "
            "reduce the step size"
        )


def integrate_rk4(
    hamiltonian: np.ndarray,
    psi0: np.ndarray,
    duration: float,
    dt: float,
    labels: Sequence[str],
    sample_every: int = 1,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> EvolutionTrace:
    """
    Integrate iħ dψ/dt = Hψ for a constant Hamiltonian with fixed-step RK4.

    The step is shrunk so an integer number of steps lands on ``duration``.

    Args:
        hamiltonian: Hermitian matrix (meV).
        psi0: Initial amplitudes.
        duration: Total time (ps).
        dt: Maximum step (ps).
        labels: Column names for the populations.
        sample_every: Record every n-th step (the last step is always kept).
        constants: Physical constants (ħ).

    Returns:
        EvolutionTrace starting at t = 0.

    Raises:
        NumericalError: If the norm drifts by more than 1e-6.
    """
    n_steps = step_count(duration, dt)
    h = duration / n_steps
    generator = -1j * np.asarray(hamiltonian, dtype=complex) / constants.hbar

    def rhs(_t: float, psi: np.ndarray) -> np.ndarray:
        return generator @ psi

    psi = np.asarray(psi0, dtype=complex).copy()
    times = [0.0]
    pops = [np.abs(psi) ** 2]
    for step in range(1, n_steps + 1):
        psi = rk4_step(psi, rhs, (step - 1) * h, h)
        if step % sample_every == 0 or step == n_steps:
            _check_drift(psi, step * h)
            times.append(step * h)
            pops.append(np.abs(psi) ** 2)
    logger.debug("[RK4] %d steps of %.4g ps", n_steps, h)
    return EvolutionTrace(
        times=np.asarray(times), populations=np.vstack(pops), labels=tuple(labels),
        final_state=psi,
    )


def propagate_exact(
    hamiltonian: np.ndarray,
    psi0: np.ndarray,
    duration: float,
    dt: float,
    labels: Sequence[str],
    t0: float = 0.0,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> EvolutionTrace:
    """
    Evolve with the exact step propagator expm(-iH·h/ħ) of a constant Hamiltonian.

    Returns amplitudes in the frame the Hamiltonian is written in; sampling
    happens at every step.

    Raises:
        NumericalError: If the norm drifts by more than 1e-6.
    """
    n_steps = step_count(duration, dt)
    h = duration / n_steps
    propagator = expm(-1j * np.asarray(hamiltonian, dtype=complex) * h / constants.hbar)
    psi = np.asarray(psi0, dtype=complex).copy()
    times = np.empty(n_steps + 1)
    pops = np.empty((n_steps + 1, psi.size))
    times[0] = t0
    pops[0] = np.abs(psi) ** 2
    for step in range(1, n_steps + 1):
        psi = propagator @ psi
        times[step] = t0 + step * h
        pops[step] = np.abs(psi) ** 2
    _check_drift(psi, t0 + duration)
    return EvolutionTrace(times=times, populations=pops, labels=tuple(labels), final_state=psi)
