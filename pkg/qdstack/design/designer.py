"""
Stack designer: search for dot half-widths whose spectrum passes every
selectivity requirement.

The search is a multi-start coordinate descent on a lattice of half-widths.
Each start draws random lattice indices from a seeded generator, then
repeatedly tries moving one dot up or down by the current step, keeping any
move that raises the normalized margin. The step halves when a full sweep
finds nothing better; a start ends once the unit step is exhausted or the
sweep cap is reached. Starts run in index order and the first one ending
feasible is accepted; otherwise the best start is reported as infeasible.

Main Classes:
    DesignProblem: Search inputs and iteration limits
    DesignReport: Selectivity outcome with the transition listing

Example:
    >>> from qdstack.design.designer import validate_transitions, load_table1
    >>> report = validate_transitions(load_table1(), T_sw=10.0)
    >>> report.feasible
    True
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from timeit import default_timer as timer
from typing import Any

import numpy as np
import pandas as pd
from tqdm import tqdm

from qdstack.exceptions import ParameterError
from qdstack.physics.constants import DEFAULT_CONSTANTS, PhysicalConstants
from qdstack.physics.dots import sweep_half_widths
from qdstack.physics.materials import DEFAULT_MATERIALS, MaterialParams
from qdstack.spectrum.levels import (
    DEFAULT_B1_TESLA,
    DEFAULT_B_TESLA,
    DEFAULT_TSW_PS,
    SpinLevelTable,
    StackDesign,
    Transition,
    level_table,
)
from qdstack.spectrum.selectivity import (
    SELECTIVITY_TOLERANCE_MEV,
    SQRT3,
    SelectivityReport,
    check_optical_selectivity,
    check_optical_transitions,
    check_rotation_values,
    optical_rabi_energy,
)

logger = logging.getLogger(__name__)

DEFAULT_BOUNDS_NM = (1.0, 12.0)
DEFAULT_LATERAL_NM = 10.0
DEFAULT_N_STARTS = 64
DEFAULT_MAX_ITERATIONS = 500
DEFAULT_GRID_STEP_NM = 0.02

TABLE_COLUMNS = ["k-l", "dE00_meV", "dE11_meV", "pass17"]
_PAIR_LABEL = re.compile(r"^\s*(\d+)\s*-\s*(\d+)\s*$")


@dataclass(frozen=True)
class DesignProblem:
    """Inputs of one stack search.

    Attributes:
        n_dots: Number of dots, >= 2.
        B: Static field (T).
        B1: Rotational-field amplitude (T).
        T_sw: Optical switching time (ps).
        well: Dot material.
        barrier: Barrier material.
        d_lt: Lateral extension of every dot (nm).
        bounds: (d_min, d_max) for the half-widths (nm); equal bounds are allowed.
        seed: Seed of the start generator.
        n_starts: Number of random starts.
        max_iterations: Sweep cap per start.
        grid_step: Lattice spacing of the half-widths (nm).
        strict: Check cross talk between all driven transitions.
    """

    n_dots: int
    B: float = DEFAULT_B_TESLA
    B1: float = DEFAULT_B1_TESLA
    T_sw: float = DEFAULT_TSW_PS
    well: MaterialParams = field(default_factory=lambda: DEFAULT_MATERIALS["InAs"])
    barrier: MaterialParams = field(default_factory=lambda: DEFAULT_MATERIALS["GaAs"])
    d_lt: float = DEFAULT_LATERAL_NM
    bounds: tuple[float, float] = DEFAULT_BOUNDS_NM
    seed: int = 0
    n_starts: int = DEFAULT_N_STARTS
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    grid_step: float = DEFAULT_GRID_STEP_NM
    strict: bool = True

    def __post_init__(self) -> None:
        if self.n_dots < 2:
            raise ParameterError(f"n_dots must be >= 2, got {self.n_dots}")
        d_min, d_max = self.bounds
        if not 0 < d_min <= d_max:
            raise ParameterError(f"bounds must satisfy 0 < d_min <= d_max, got {self.bounds}")
        if not self.grid_step > 0:
            raise ParameterError(f"grid_step must be > 0, got {self.grid_step}")
        if self.n_starts < 1 or self.max_iterations < 1:
            raise ParameterError("n_starts and max_iterations must be >= 1")
        if not self.T_sw > 0:
            raise ParameterError(f"T_sw must be > 0, got {self.T_sw}")

    def lattice(self) -> np.ndarray:
        d_min, d_max = self.bounds
        n_points = int(math.floor((d_max - d_min) / self.grid_step + 1e-9)) + 1
        return d_min + self.grid_step * np.arange(n_points)


@dataclass
class DesignReport:
    """Outcome of a design search or a validation.

    Attributes:
        stack: Designed or validated stack; None for raw-table validation.
        rotation: Rotation report; None when no g-factors are known.
        optical: Optical report.
        table: Adjacent-pair listing with columns k-l, dE00_meV, dE11_meV, pass17.
        worst_margin: Smallest actual - threshold over all requirements (meV).
        normalized_margin: Smallest margin relative to its threshold.
        feasible: True iff every requirement passes.
        best_start: Index of the start that produced the stack, if searched.
    """

    stack: StackDesign | None
    rotation: SelectivityReport | None
    optical: SelectivityReport
    table: pd.DataFrame
    worst_margin: float
    normalized_margin: float
    feasible: bool
    best_start: int | None = None

    @property
    def selectivity(self) -> SelectivityReport:
        return self.optical if self.rotation is None else self.rotation.merge(self.optical)

    def to_frame(self) -> pd.DataFrame:
        return self.table.loc[:, TABLE_COLUMNS].copy()

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary; non-finite numbers become strings."""
        geometry = None
        if self.stack is not None:
            first = self.stack.dots[0]
            geometry = {
                "half_widths_nm": [round(d, 10) for d in self.stack.half_widths],
                "lateral_nm": _json_number(first.lateral_d_lt),
                "well": first.well_material.name,
                "barrier": first.barrier_material.name,
            }
        return {
            "geometry": geometry,
            "B_tesla": None if self.stack is None else self.stack.B,
            "B1_tesla": None if self.stack is None else self.stack.B1,
            "T_sw_ps": None if self.stack is None else self.stack.T_sw,
            "feasible": self.feasible,
            "worst_margin_meV": _json_number(self.worst_margin),
            "normalized_margin": _json_number(self.normalized_margin),
            "min_pairwise_gap_meV": _json_number(self.optical.min_pairwise_gap),
            "best_start": self.best_start,
            "violations": [
                {
                    "constraint": v.constraint,
                    "subject": v.subject,
                    "actual_meV": v.actual,
                    "threshold_meV": v.threshold,
                }
                for v in self.selectivity.violations
            ],
        }


def _json_number(value: float | None) -> float | str | None:
    if value is None:
        return None
    return float(value) if math.isfinite(value) else str(value)


# =============================================================================
# Reports
# =============================================================================


def _transition_table(
    transitions: list[Transition], T_sw: float, labels: list[str]
) -> pd.DataFrame:
    threshold = SQRT3 * optical_rabi_energy(T_sw)
    rows = []
    for label, (up, down) in zip(labels, zip(transitions[0::2], transitions[1::2])):
        gap = abs(abs(up.energy) - abs(down.energy))
        rows.append(
            {
                "k-l": label,
                "dE00_meV": up.energy,
                "dE11_meV": down.energy,
                "pass17": bool(gap - threshold >= -SELECTIVITY_TOLERANCE_MEV),
            }
        )
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def _report(
    stack: StackDesign | None,
    rotation: SelectivityReport | None,
    optical: SelectivityReport,
    table: pd.DataFrame,
    best_start: int | None = None,
) -> DesignReport:
    combined = optical if rotation is None else rotation.merge(optical)
    return DesignReport(
        stack=stack,
        rotation=rotation,
        optical=optical,
        table=table,
        worst_margin=combined.margin_meV,
        normalized_margin=combined.normalized_margin,
        feasible=combined.passed,
        best_start=best_start,
    )


def validate_stack(
    stack: StackDesign,
    T_sw: float | None = None,
    strict: bool = True,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> DesignReport:
    """
    Evaluate every selectivity requirement on a stack.

    Args:
        stack: Stack to check.
        T_sw: Switching time (ps); the stack's own when omitted.
        strict: Cross-talk mode of the optical check.
        constants: Physical constants.

    Returns:
        DesignReport with the adjacent-pair listing (0-based dot labels).
    """
    T_sw = stack.T_sw if T_sw is None else T_sw
    table = level_table(stack, constants)
    return _validate_table(table, stack, stack.B, stack.B1, T_sw, strict, constants)


def _validate_table(
    table: SpinLevelTable,
    stack: StackDesign | None,
    B: float,
    B1: float,
    T_sw: float,
    strict: bool,
    constants: PhysicalConstants,
    best_start: int | None = None,
) -> DesignReport:
    rotation = check_rotation_values(table.g_values, B, B1, constants)
    optical = check_optical_selectivity(table, T_sw, strict=strict, constants=constants)
    transitions = table.adjacent_transitions()
    labels = [f"{k}-{k + 1}" for k in range(table.n_dots - 1)]
    frame = _transition_table(transitions, T_sw, labels)
    return _report(stack, rotation, optical, frame, best_start)


def validate_transitions(
    frame: pd.DataFrame,
    T_sw: float = DEFAULT_TSW_PS,
    strict: bool = True,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> DesignReport:
    """
    Check the optical requirements on a raw transition listing.

    Args:
        frame: Columns ``k-l`` (labels such as ``1-2``), ``dE00_meV`` and ``dE11_meV``.
        T_sw: Switching time (ps).
        strict: Cross-talk mode.
        constants: Physical constants.

    Returns:
        DesignReport with ``stack`` and ``rotation`` set to None.

    Raises:
        ParameterError: On missing columns, non-numeric energies or malformed pair labels.
    """
    missing = [col for col in TABLE_COLUMNS[:3] if col not in frame.columns]
    if missing:
        raise ParameterError(f"transition table is missing columns {missing}")
    if frame.empty:
        raise ParameterError("transition table has no rows")
    energies = {}
    for col in TABLE_COLUMNS[1:3]:
        values = pd.to_numeric(frame[col], errors="coerce")
        bad = frame.loc[~np.isfinite(values), "k-l"].astype(str).tolist()
        if bad:
            raise ParameterError(f"column {col} needs finite numbers; bad rows {bad}")
        energies[col] = values.to_numpy(dtype=float)
    transitions = []
    labels = []
    for i, label in enumerate(frame["k-l"].astype(str)):
        match = _PAIR_LABEL.match(label)
        if not match:
            raise ParameterError(f"malformed pair label '{label}'")
        k, l = (int(group) for group in match.groups())
        transitions.append(Transition(0, k, l, float(energies["dE00_meV"][i])))
        transitions.append(Transition(1, k, l, float(energies["dE11_meV"][i])))
        labels.append(label.strip())
    optical = check_optical_transitions(transitions, T_sw, strict, constants)
    return _report(None, None, optical, _transition_table(transitions, T_sw, labels))


def load_table1() -> pd.DataFrame:
    """The published 9-dot transition listing shipped with the package."""
    source = resources.files("qdstack").joinpath("data", "table1.csv")
    with source.open("r", encoding="utf-8") as handle:
        return pd.read_csv(handle, dtype={"k-l": str}, float_precision="round_trip")


# =============================================================================
# Search
# =============================================================================


class _LatticeObjective:
    """Memoized normalized margin of lattice index vectors."""

    def __init__(self, problem: DesignProblem, constants: PhysicalConstants) -> None:
        self.problem = problem
        self.constants = constants
        self.half_widths = problem.lattice()
        sweep = sweep_half_widths(
            problem.well, problem.barrier, problem.d_lt, self.half_widths, constants
        )
        self.E_k = sweep["E_k_meV"].to_numpy()
        self.g = sweep["g"].to_numpy()
        self._cache: dict[tuple[int, ...], tuple[float, bool]] = {}

    @property
    def n_points(self) -> int:
        return int(self.half_widths.size)

    @property
    def evaluations(self) -> int:
        return len(self._cache)

    def table(self, indices: tuple[int, ...]) -> SpinLevelTable:
        idx = np.asarray(indices)
        return SpinLevelTable.from_arrays(
            self.E_k[idx], self.g[idx], self.problem.B, self.constants
        )

    def __call__(self, indices: tuple[int, ...]) -> tuple[float, bool]:
        if indices not in self._cache:
            problem = self.problem
            table = self.table(indices)
            rotation = check_rotation_values(table.g_values, problem.B, problem.B1, self.constants)
            optical = check_optical_selectivity(
                table, problem.T_sw, strict=problem.strict, constants=self.constants
            )
            merged = rotation.merge(optical)
            self._cache[indices] = (merged.normalized_margin, merged.passed)
        return self._cache[indices]


def _descend(
    objective: _LatticeObjective, start: tuple[int, ...], max_iterations: int
) -> tuple[tuple[int, ...], float, bool]:
    current = start
    value, passed = objective(current)
    step = max(1, objective.n_points // 4)
    for _ in range(max_iterations):
        improved = False
        for dot in range(len(current)):
            for direction in (step, -step):
                moved = current[dot] + direction
                if not 0 <= moved < objective.n_points:
                    continue
                candidate = current[:dot] + (moved,) + current[dot + 1 :]
                cand_value, cand_passed = objective(candidate)
                if cand_value > value:
                    current, value, passed = candidate, cand_value, cand_passed
                    improved = True
        if not improved:
            if step == 1:
                break
            step //= 2
    return current, value, passed


def design_stack(
    problem: DesignProblem,
    progress: bool = False,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> DesignReport:
    """
    Search for a stack satisfying the rotation and optical requirements.

    Args:
        problem: Search inputs and iteration limits.
        progress: Show a tqdm bar over the starts.
        constants: Physical constants.

    Returns:
        DesignReport of the first feasible start, or of the best start with
        ``feasible=False`` when none succeeds. Identical problems give
        identical reports.
    """
    t0 = timer()
    objective = _LatticeObjective(problem, constants)
    rng = np.random.default_rng(problem.seed)
    best: tuple[float, tuple[int, ...], int] | None = None
    chosen: tuple[tuple[int, ...], int] | None = None

    for start in tqdm(range(problem.n_starts), desc="design starts", disable=not progress):
        initial = tuple(int(i) for i in rng.integers(0, objective.n_points, size=problem.n_dots))
        final, value, passed = _descend(objective, initial, problem.max_iterations)
        logger.debug("[DESIGN] start %d: normalized margin %.6g", start, value)
        if best is None or value > best[0]:
            best = (value, final, start)
        if passed:
            chosen = (final, start)
            break

    indices, start = chosen if chosen is not None else (best[1], best[2])  # type: ignore[index]
    stack = StackDesign.from_half_widths(
        [float(objective.half_widths[i]) for i in indices],
        problem.d_lt,
        problem.well,
        problem.barrier,
        B=problem.B,
        B1=problem.B1,
        T_sw=problem.T_sw,
    )
    report = validate_stack(stack, problem.T_sw, strict=problem.strict, constants=constants)
    report.best_start = start
    logger.info(
        "[DESIGN] %d dots: feasible=%s normalized margin %.4g (start %d, %d evaluations, %.2fs)",
        problem.n_dots,
        report.feasible,
        report.normalized_margin,
        start,
        objective.evaluations,
        timer() - t0,
    )
    return report
