"""Tests for qdstack.dynamics: analytic Rabi formulas, integrators and Vee leakage."""

from __future__ import annotations

import math

import numpy as np
import pytest

from qdstack.dynamics import (
    EvolutionTrace,
    TwoLevelPulse,
    VeeSpec,
    cancellation_detuning,
    cancellation_error,
    evolve_two_level,
    evolve_vee,
    generalized_rabi,
    integrate_rk4,
    pi_pulse_duration,
    propagate_exact,
    rk4_step,
    step_count,
    two_level_population,
)
from qdstack.exceptions import ParameterError
from qdstack.spectrum import optical_rabi_energy

HBAR = 0.65821196
RABI_10PS = math.pi * HBAR / 10.0


class TestAnalyticRabi:
    """Closed-form two-level results."""

    def test_generalized_rabi(self):
        assert generalized_rabi(0.3, 0.4) == pytest.approx(0.5)
        assert generalized_rabi(RABI_10PS, 0.0) == RABI_10PS

    def test_pi_pulse_duration(self):
        assert pi_pulse_duration(RABI_10PS) == pytest.approx(10.0, rel=1e-12)

    def test_resonant_pi_pulse_inverts(self):
        pulse = TwoLevelPulse(RABI_10PS)
        assert two_level_population(pulse, 10.0) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize(
        "n, factor", [(1, math.sqrt(3)), (2, math.sqrt(15)), (3, math.sqrt(35))]
    )
    def test_cancellation_detuning(self, n, factor):
        assert cancellation_detuning(10.0, n) == pytest.approx(factor * RABI_10PS, rel=1e-12)

    def test_first_cancellation_value(self):
        assert cancellation_detuning(10.0, 1) == pytest.approx(0.358159, abs=1e-6)
        assert cancellation_detuning(10.0, 1) == pytest.approx(
            math.sqrt(3) * optical_rabi_energy(10.0), rel=1e-12
        )

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_spectator_returns_after_pi_pulse(self, n):
        detuning = cancellation_detuning(10.0, n)
        assert cancellation_error(RABI_10PS, detuning) < 1e-9

    def test_spectator_peak_is_quarter(self):
        pulse = TwoLevelPulse(RABI_10PS, math.sqrt(3) * RABI_10PS)
        times = np.linspace(0.0, 10.0, 100_001)
        populations = two_level_population(pulse, times)
        assert populations.max() == pytest.approx(0.25, abs=1e-6)
        assert populations[-1] < 1e-9

    def test_detuning_off_cancellation_leaks(self):
        assert cancellation_error(RABI_10PS, 0.5) > 1e-3

    @pytest.mark.parametrize("n", [0, -1, 1.5, True])
    def test_invalid_cycle_count(self, n):
        with pytest.raises(ParameterError):
            cancellation_detuning(10.0, n)

    def test_default_duration_is_pi_time(self):
        pulse = TwoLevelPulse(RABI_10PS)
        assert pulse.duration == pytest.approx(10.0, rel=1e-12)
        trace = evolve_two_level(pulse)
        assert trace.times[-1] == pytest.approx(10.0)
        assert trace.column("p2")[-1] == pytest.approx(1.0, abs=1e-6)

    def test_invalid_pulse(self):
        with pytest.raises(ParameterError):
            TwoLevelPulse(0.0)
        with pytest.raises(ParameterError):
            two_level_population(TwoLevelPulse(RABI_10PS), -1.0)


class TestIntegrators:
    """RK4 and exact propagators on constant Hamiltonians."""

    def test_step_count_lands_on_duration(self):
        assert step_count(10.0, 0.005) == 2000
        assert step_count(10.0, 0.003) == 3334
        assert step_count(0.0, 0.1) == 1

    def test_single_rk4_step(self):
        psi = rk4_step(np.array([1.0 + 0j]), lambda t, p: -1j * p, 0.0, 0.1)
        assert psi[0] == pytest.approx(np.exp(-0.1j), abs=1e-7)

    def test_rk4_matches_analytic_two_level(self):
        pulse = TwoLevelPulse(RABI_10PS, 0.1, duration=10.0)
        trace = evolve_two_level(pulse)
        expected = two_level_population(pulse, trace.times)
        np.testing.assert_allclose(trace.column("p2"), expected, atol=1e-8)
        np.testing.assert_allclose(trace.column("p3"), 0.0, atol=1e-15)

    def test_rk4_cancelled_spectator(self):
        pulse = TwoLevelPulse(RABI_10PS, math.sqrt(3) * RABI_10PS, duration=10.0)
        assert evolve_two_level(pulse).final_populations[1] < 1e-9

    def test_rk4_converges_when_halving_step(self):
        hamiltonian = np.array([[0.0, 0.1], [0.1, 0.3]])
        psi0 = np.array([1.0, 0.0])
        coarse = integrate_rk4(hamiltonian, psi0, 20.0, 0.01, ("a", "b"))
        fine = integrate_rk4(hamiltonian, psi0, 20.0, 0.005, ("a", "b"))
        assert np.max(np.abs(coarse.final_state - fine.final_state)) < 1e-6

    def test_exact_and_rk4_agree(self):
        rng = np.random.default_rng(7)
        raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        hamiltonian = 0.1 * (raw + raw.conj().T)
        psi0 = np.array([1.0, 0.0, 0.0, 0.0])
        labels = tuple("abcd")
        exact = propagate_exact(hamiltonian, psi0, 5.0, 0.005, labels)
        rk4 = integrate_rk4(hamiltonian, psi0, 5.0, 0.005, labels)
        assert np.max(np.abs(exact.final_state - rk4.final_state)) < 1e-8
        assert exact.max_trace_error() < 1e-10

    def test_sampling_keeps_last_step(self):
        trace = integrate_rk4(np.diag([0.0, 1.0]), np.array([1.0, 0.0]), 1.0, 0.01, ("a", "b"), 7)
        assert trace.times[0] == 0.0
        assert trace.times[-1] == pytest.approx(1.0)
        assert len(trace.times) == 1 + 100 // 7 + 1

    def test_concatenate_drops_shared_samples(self):
        labels = ("a", "b")
        first = EvolutionTrace(np.array([0.0, 1.0]), np.array([[1.0, 0.0], [0.5, 0.5]]), labels)
        second = EvolutionTrace(np.array([1.0, 2.0]), np.array([[0.5, 0.5], [0.0, 1.0]]), labels)
        joined = EvolutionTrace.concatenate([first, second])
        np.testing.assert_array_equal(joined.times, [0.0, 1.0, 2.0])
        assert list(joined.to_frame().columns) == ["t_ps", "a", "b"]


class TestVee:
    """Three-level leakage during an addressed π pulse."""

    @pytest.fixture
    def published_trace(self):
        return evolve_vee(VeeSpec(rabi_12=0.2078, rabi_13=0.2078, detuning_13=0.72, duration=12.0))

    def test_trace_is_normalised(self, published_trace):
        assert published_trace.max_trace_error() < 1e-8
        assert published_trace.labels == ("p1", "p2", "p3")

    def test_pi_pulse_completes_near_ten_ps(self, published_trace):
        p2 = published_trace.column("p2")
        peak = int(np.argmax(p2))
        assert p2[peak] >= 0.95
        assert 9.5 <= published_trace.times[peak] <= 10.5

    def test_leakage_stays_small(self, published_trace):
        p3 = published_trace.column("p3")
        assert p3[-1] < 0.05
        assert p3.max() < 0.08

    def test_decoupled_spectator_reduces_to_two_level(self):
        spec = VeeSpec(rabi_12=RABI_10PS, rabi_13=0.0, detuning_13=0.72, duration=10.0)
        trace = evolve_vee(spec)
        expected = two_level_population(TwoLevelPulse(RABI_10PS), trace.times)
        np.testing.assert_allclose(trace.column("p2"), expected, atol=1e-8)

    def test_halving_step_converges(self):
        coarse = evolve_vee(VeeSpec(rabi_12=0.2078, detuning_13=0.72, duration=12.0, dt=0.01))
        fine = evolve_vee(
            VeeSpec(rabi_12=0.2078, detuning_13=0.72, duration=12.0, dt=0.005, sample_every=2)
        )
        np.testing.assert_allclose(fine.times, coarse.times, atol=1e-12)
        assert np.max(np.abs(fine.populations - coarse.populations)) < 1e-6

    def test_from_switching_time(self):
        spec = VeeSpec.from_switching_time(10.0, 0.72)
        assert spec.rabi_12 == pytest.approx(RABI_10PS)
        assert spec.rabi_13 == spec.rabi_12
        assert spec.duration == 10.0
        assert spec.dt == pytest.approx(0.005)

    def test_coarse_step_rejected(self):
        with pytest.raises(ParameterError, match="dt"):
            VeeSpec(rabi_12=0.2, detuning_13=0.7, duration=1.0, dt=0.1)

    def test_sample_every_thins_output(self):
        spec = VeeSpec(rabi_12=0.2078, detuning_13=0.72, duration=12.0, sample_every=10)
        trace = evolve_vee(spec)
        assert len(trace.times) < 300
        assert trace.times[-1] == pytest.approx(12.0)
