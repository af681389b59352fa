"""
Two-electron configuration space over a dot stack.

A configuration is an unordered pair of spin orbitals ``(dot, spin)``,
stored sorted. Strict mode forbids two electrons in one dot; extended mode
allows the opposite-spin pair, which costs the on-site energy U.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from qdstack.exceptions import ParameterError

NORM_TOLERANCE = 1e-10

Orbital = tuple[int, int]
Configuration = tuple[Orbital, Orbital]


class BasisMode(str, Enum):
    STRICT = "strict"
    EXTENDED = "extended"


def configuration(first: Orbital, second: Orbital) -> Configuration:
    """Canonical (sorted) configuration of two distinct orbitals."""
    if first == second:
        raise ParameterError(f"Pauli exclusion: orbital {first} occupied twice")
    return (first, second) if first < second else (second, first)


def is_double(config: Configuration) -> bool:
    return config[0][0] == config[1][0]


def config_label(config: Configuration) -> str:
    """Compact label such as ``0u-2d`` (dot index plus u/d spin)."""
    return "-".join(f"{dot}{'ud'[spin]}" for dot, spin in config)


@dataclass(frozen=True)
class TwoElectronBasis:
    """Enumerated two-electron configurations in canonical order."""

    n_dots: int
    mode: BasisMode
    states: tuple[Configuration, ...]
    _index: dict[Configuration, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {state: i for i, state in enumerate(self.states)})

    def __len__(self) -> int:
        return len(self.states)

    def __contains__(self, config: object) -> bool:
        return config in self._index

    def index(self, config: Configuration) -> int:
        try:
            return self._index[config]
        except KeyError:
            raise ParameterError(f"configuration {config} not in {self.mode.value} basis") from None

    @property
    def labels(self) -> list[str]:
        return [config_label(state) for state in self.states]

    def double_mask(self) -> np.ndarray:
        """Boolean mask of doubly-occupied configurations."""
        return np.array([is_double(state) for state in self.states], dtype=bool)


def enumerate_basis(n_dots: int, mode: BasisMode | str = BasisMode.STRICT) -> TwoElectronBasis:
    """
    Enumerate two-electron configurations lexicographically by (dot, spin) pairs.

    Args:
        n_dots: Number of dots, >= 1.
        mode: ``strict`` or ``extended``.

    Returns:
        TwoElectronBasis; 3 dots give 12 strict or 15 extended states.
    """
    if n_dots < 1:
        raise ParameterError(f"n_dots must be >= 1, got {n_dots}")
    mode = BasisMode(mode)
    orbitals = [(dot, spin) for dot in range(n_dots) for spin in (0, 1)]
    states = tuple(
        pair
        for pair in combinations(orbitals, 2)
        if mode is BasisMode.EXTENDED or not is_double(pair)
    )
    return TwoElectronBasis(n_dots=n_dots, mode=mode, states=states)


@dataclass(frozen=True, eq=False)
class TwoElectronState:
    """Normalized amplitude vector over a TwoElectronBasis."""

    basis: TwoElectronBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (len(self.basis),):
            raise ParameterError(
                f"expected {len(self.basis)} amplitudes, got shape {amplitudes.shape}"
            )
        norm2 = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm2 - 1.0) > NORM_TOLERANCE:
            raise ParameterError(f"state is not normalized (|ψ|² = {norm2:.12g})")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_configuration(
        cls, basis: TwoElectronBasis, config: Configuration
    ) -> TwoElectronState:
        amplitudes = np.zeros(len(basis), dtype=complex)
        amplitudes[basis.index(config)] = 1.0
        return cls(basis, amplitudes)

    @classmethod
    def from_mapping(
        cls, basis: TwoElectronBasis, amplitudes: dict[Configuration, complex]
    ) -> TwoElectronState:
        vector = np.zeros(len(basis), dtype=complex)
        for config, amp in amplitudes.items():
            vector[basis.index(config)] += amp
        return cls(basis, vector)

    def amplitude(self, config: Configuration) -> complex:
        return complex(self.amplitudes[self.basis.index(config)])

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def occupied_dots(self, threshold: float = 1e-12) -> set[int]:
        """Dots carrying any electron in a configuration with non-negligible weight."""
        dots: set[int] = set()
        for config, pop in zip(self.basis.states, self.populations()):
            if pop > threshold:
                dots.update(dot for dot, _ in config)
        return dots

    def embed(self, basis: TwoElectronBasis) -> TwoElectronState:
        """
        Re-express the state in another basis over the same dots.

        Raises:
            ParameterError: If weight sits on a configuration the target lacks.
        """
        if basis.n_dots != self.basis.n_dots:
            raise ParameterError("cannot embed between stacks of different size")
        vector = np.zeros(len(basis), dtype=complex)
        for config, amp in zip(self.basis.states, self.amplitudes):
            if config in basis:
                vector[basis.index(config)] = amp
            elif abs(amp) > 0:
                raise ParameterError(f"configuration {config} missing from target basis")
        return TwoElectronState(basis, vector)

    def to_rows(self) -> list[dict[str, float | str]]:
        return [
            {"state": label, "re": amp.real, "im": amp.imag, "population": abs(amp) ** 2}
            for label, amp in zip(self.basis.labels, self.amplitudes)
        ]


def fidelity(a: TwoElectronState, b: TwoElectronState) -> float:
    """
    |⟨a|b⟩|², invariant under global phases.

    States over different bases of the same stack are compared after
    embedding the smaller basis into the larger.
    """
    if a.basis != b.basis:
        if len(a.basis) < len(b.basis):
            a = a.embed(b.basis)
        else:
            b = b.embed(a.basis)
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(1.0, max(0.0, abs(overlap) ** 2)))
