"""
Spectral selectivity requirements for rotations and optical hops.

Three requirements are evaluated:

* rotation: for every ordered pair of dots, the Zeeman detuning
  |g_i - g_j|·μ_B·B must be at least √3·|g_i|·μ_B·B1 (the Rabi energy of
  dot i), so a π rotation of one dot is a 2π cycle for the others;
* optical spin pair: for each driven pair of dots,
  ||ΔE_00kl| - |ΔE_11kl|| ≥ √3·ħΩ_op;
* optical cross talk: two driven same-spin transitions must differ by
  2√3·ħΩ_op. In strict mode every pair of driven transitions is checked;
  otherwise only same-spin transitions sharing a dot.

Here ħΩ_op = πħ/T_sw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from qdstack.exceptions import ParameterError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants
from qdstack.spectrum.levels import StackDesign, SpinLevelTable, Transition, level_table

SELECTIVITY_TOLERANCE_MEV = 1e-9
SQRT3 = math.sqrt(3.0)

ROTATION = "rotation"
SPIN_PAIR = "optical_spin_pair"
CROSS_TALK = "optical_cross_talk"


@dataclass(frozen=True)
class Violation:
    """One failed constraint: ``actual`` fell below ``threshold`` (meV)."""

    constraint: str
    subject: str
    actual: float
    threshold: float

    @property
    def margin(self) -> float:
        return self.actual - self.threshold


@dataclass(frozen=True)
class SelectivityReport:
    """Outcome of one or more selectivity checks.

    Attributes:
        passed: True iff there are no violations.
        margin_meV: Smallest actual - threshold over all checked constraints.
        normalized_margin: Smallest (actual - threshold)/threshold; +inf when
            every threshold is zero.
        violations: Failed constraints.
        checks: Number of constraints evaluated.
        min_pairwise_gap: Smallest gap between driven transition magnitudes
            (optical reports only).
    """

    passed: bool
    margin_meV: float
    normalized_margin: float
    violations: tuple[Violation, ...] = field(default_factory=tuple)
    checks: int = 0
    min_pairwise_gap: float | None = None

    def merge(self, other: SelectivityReport) -> SelectivityReport:
        """Combine two reports; the result passes only if both do."""
        gaps = [gap for gap in (self.min_pairwise_gap, other.min_pairwise_gap) if gap is not None]
        return SelectivityReport(
            passed=self.passed and other.passed,
            margin_meV=min(self.margin_meV, other.margin_meV),
            normalized_margin=min(self.normalized_margin, other.normalized_margin),
            violations=self.violations + other.violations,
            checks=self.checks + other.checks,
            min_pairwise_gap=min(gaps) if gaps else None,
        )


def optical_rabi_energy(T_sw: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """ħΩ_op = πħ/T_sw (meV)."""
    if not T_sw > 0:
        raise ParameterError(f"T_sw must be > 0, got {T_sw}")
    return math.pi * constants.hbar / T_sw


def magnetic_rabi_energy(
    g: float, B1: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """ħΩ_R = |g|·μ_B·B1 (meV)."""
    return abs(g) * constants.mu_B * B1


def _build_report(
    actual: np.ndarray,
    threshold: np.ndarray,
    constraint: str,
    subjects: Sequence[str],
    min_pairwise_gap: float | None = None,
) -> SelectivityReport:
    if actual.size == 0:
        return SelectivityReport(
            passed=True, margin_meV=math.inf, normalized_margin=math.inf,
            min_pairwise_gap=min_pairwise_gap,
        )
    margin = actual - threshold
    positive = threshold > 0
    normalized = (
        float(np.min(margin[positive] / threshold[positive])) if positive.any() else math.inf
    )
    failed = np.flatnonzero(margin < -SELECTIVITY_TOLERANCE_MEV)
    violations = tuple(
        Violation(constraint, subjects[idx], float(actual[idx]), float(threshold[idx]))
        for idx in failed
    )
    return SelectivityReport(
        passed=not violations,
        margin_meV=float(np.min(margin)),
        normalized_margin=normalized,
        violations=violations,
        checks=int(actual.size),
        min_pairwise_gap=min_pairwise_gap,
    )


# =============================================================================
# Rotation Selectivity
# =============================================================================


def check_rotation_values(
    g_values: Sequence[float] | np.ndarray,
    B: float,
    B1: float,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> SelectivityReport:
    """
    Rotation requirement evaluated directly on g-factors.

    Raises:
        ParameterError: If fewer than two dots are given.
    """
    g = np.asarray(g_values, dtype=float)
    n = g.size
    if n < 2:
        raise ParameterError("rotation selectivity needs at least two dots")
    i_idx, j_idx = np.nonzero(~np.eye(n, dtype=bool))
    actual = np.abs(g[i_idx] - g[j_idx]) * constants.mu_B * B
    threshold = SQRT3 * np.abs(g[i_idx]) * constants.mu_B * B1
    subjects = [f"dot {i} vs dot {j}" for i, j in zip(i_idx, j_idx)]
    return _build_report(actual, threshold, ROTATION, subjects)


def check_rotation_selectivity(
    stack: StackDesign,
    table: SpinLevelTable | None = None,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> SelectivityReport:
    """
    Check that each dot can be rotated without disturbing the others.

    Args:
        stack: Stack with B and B1.
        table: Precomputed level table; built from the stack when omitted.
        constants: Physical constants.

    Returns:
        SelectivityReport over all ordered pairs of dots.
    """
    table = table or level_table(stack, constants)
    return check_rotation_values(table.g_values, stack.B, stack.B1, constants)


# =============================================================================
# Optical Selectivity
# =============================================================================


def check_optical_transitions(
    transitions: Iterable[Transition],
    T_sw: float,
    strict: bool = True,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> SelectivityReport:
    """
    Optical requirements on a raw list of driven transitions.

    Transitions are grouped into dot pairs by (k, l); each pair needs both
    spins for the spin-pair requirement.

    Args:
        transitions: Driven same-spin transitions.
        T_sw: Switching time (ps).
        strict: Check every pair of transitions for cross talk instead of
            only same-spin transitions sharing a dot.
        constants: Physical constants.

    Returns:
        SelectivityReport including the minimum pairwise gap.
    """
    transitions = list(transitions)
    if not transitions:
        raise ParameterError("at least one driven transition is required")
    rabi = optical_rabi_energy(T_sw, constants)

    by_pair: dict[tuple[int, int], dict[int, Transition]] = {}
    for tr in transitions:
        by_pair.setdefault((tr.k, tr.l), {})[tr.spin] = tr

    pair_actual = []
    pair_subjects = []
    for (k, l), spins in by_pair.items():
        if set(spins) != {0, 1}:
            raise ParameterError(f"dot pair {k}-{l} needs both spin transitions")
        pair_actual.append(abs(abs(spins[0].energy) - abs(spins[1].energy)))
        pair_subjects.append(f"{k}-{l}")
    spin_pair = _build_report(
        np.asarray(pair_actual), np.full(len(pair_actual), SQRT3 * rabi), SPIN_PAIR, pair_subjects
    )

    magnitudes = np.abs([tr.energy for tr in transitions])
    ordered = np.sort(magnitudes)
    min_gap = float(np.min(np.diff(ordered))) if ordered.size > 1 else math.inf

    cross_actual = []
    cross_subjects = []
    for a, b in combinations(range(len(transitions)), 2):
        ta, tb = transitions[a], transitions[b]
        if not strict and not (ta.spin == tb.spin and {ta.k, ta.l} & {tb.k, tb.l}):
            continue
        cross_actual.append(abs(magnitudes[a] - magnitudes[b]))
        cross_subjects.append(f"{ta.label} vs {tb.label}")
    cross = _build_report(
        np.asarray(cross_actual),
        np.full(len(cross_actual), 2.0 * SQRT3 * rabi),
        CROSS_TALK,
        cross_subjects,
    )
    return replace(spin_pair.merge(cross), min_pairwise_gap=min_gap)


def check_optical_selectivity(
    table: SpinLevelTable,
    T_sw: float,
    driven_pairs: Sequence[tuple[int, int]] | None = None,
    strict: bool = True,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> SelectivityReport:
    """
    Check the optical requirements for the driven dot pairs of a level table.

    Args:
        table: Level table of the stack.
        T_sw: Switching time (ps).
        driven_pairs: Adjacent (k, l) pairs; all neighbouring pairs when omitted.
        strict: See ``check_optical_transitions``.
        constants: Physical constants.

    Raises:
        ParameterError: If a pair is not adjacent or the list is empty.
    """
    if driven_pairs is None:
        driven_pairs = [(k, k + 1) for k in range(table.n_dots - 1)]
    if not driven_pairs:
        raise ParameterError("driven_pairs must not be empty")
    transitions = []
    for k, l in driven_pairs:
        if abs(k - l) != 1:
            raise ParameterError(f"dot pair {k}-{l} is not adjacent")
        for spin in (0, 1):
            energy = table.energy(spin, k) - table.energy(spin, l)
            transitions.append(Transition(spin, k, l, energy))
    return check_optical_transitions(transitions, T_sw, strict, constants)
