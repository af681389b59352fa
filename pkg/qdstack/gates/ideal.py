"""
Ideal gate layer: optical hops, spin rotations and the controlled-NOT.

Gate semantics on the two-electron basis:

* ``C(i, k↔l)`` moves a spin-i electron between adjacent dots k and l when
  it is alone in its dot and the destination dot is empty. Pauli-forbidden
  or Coulomb-blockaded hops leave the configuration unchanged.
* ``R(T)`` flips the spin of a lone electron in dot T.

Both are real 0/1 permutations. The controlled-NOT is the seven-pulse
sequence C1 C2 C3 R_T C3 C2 C1 executed C1 first, with
C1 = C(1, C↔S), C2 = C(1, S↔T), C3 = C(0, S↔T).

Example:
    >>> from qdstack.gates.basis import enumerate_basis
    >>> from qdstack.gates.ideal import QubitRoles, cnot_ideal, product_state
    >>> basis = enumerate_basis(3)
    >>> state = product_state(basis, QubitRoles(), control=(0, 1), target=(1, 0))
    >>> out = cnot_ideal(state)
    >>> round(abs(out.amplitude(((0, 1), (2, 1)))), 12)
    1.0
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from qdstack.exceptions import ContractError, ParameterError
from qdstack.gates.basis import Configuration, TwoElectronBasis, TwoElectronState, configuration


class GateKind(str, Enum):
    OPTICAL = "C"
    MAGNETIC = "R"


@dataclass(frozen=True)
class GateOp:
    """One pulse of a gate sequence.

    Attributes:
        kind: Optical hop (C) or magnetic rotation (R).
        spin: Spin index moved by an optical hop.
        dots: Adjacent (k, l) pair of an optical hop.
        target: Dot rotated by a magnetic pulse.
        label: Display name (C1, RT, ...).
    """

    kind: GateKind
    spin: int | None = None
    dots: tuple[int, int] | None = None
    target: int | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind is GateKind.OPTICAL:
            if self.spin not in (0, 1):
                raise ParameterError(f"optical gate needs spin 0 or 1, got {self.spin}")
            if self.dots is None or abs(self.dots[0] - self.dots[1]) != 1 or min(self.dots) < 0:
                raise ParameterError(f"optical gate needs an adjacent dot pair, got {self.dots}")
        elif self.target is None or self.target < 0:
            raise ParameterError(f"rotation needs a target dot, got {self.target}")
        if not self.label:
            object.__setattr__(self, "label", self.token)

    @classmethod
    def optical(cls, spin: int, k: int, l: int, label: str = "") -> GateOp:
        return cls(GateKind.OPTICAL, spin=spin, dots=(k, l), label=label)

    @classmethod
    def magnetic(cls, target: int, label: str = "") -> GateOp:
        return cls(GateKind.MAGNETIC, target=target, label=label)

    @property
    def token(self) -> str:
        if self.kind is GateKind.OPTICAL:
            k, l = self.dots  # type: ignore[misc]
            return f"C:{self.spin}:{k}-{l}"
        return f"R:{self.target}"

    def max_dot(self) -> int:
        return max(self.dots) if self.kind is GateKind.OPTICAL else self.target  # type: ignore


@dataclass(frozen=True)
class QubitRoles:
    """Stack indices of the control, swap and target dots."""

    control: int = 0
    swap: int = 1
    target: int = 2

    def __post_init__(self) -> None:
        if len({self.control, self.swap, self.target}) != 3:
            raise ParameterError("control, swap and target must be distinct dots")
        if abs(self.control - self.swap) != 1 or abs(self.swap - self.target) != 1:
            raise ParameterError("the swap dot must neighbour both control and target")


def cnot_sequence(roles: QubitRoles = QubitRoles()) -> list[GateOp]:
    """The seven pulses of the controlled-NOT in time order."""
    c1 = GateOp.optical(1, roles.control, roles.swap, "C1")
    c2 = GateOp.optical(1, roles.swap, roles.target, "C2")
    c3 = GateOp.optical(0, roles.swap, roles.target, "C3")
    rt = GateOp.magnetic(roles.target, "RT")
    return [c1, c2, c3, rt, c3, c2, c1]


_GENERAL_C = re.compile(r"^C:([01]):(\d+)-(\d+)$")
_GENERAL_R = re.compile(r"^R:(\d+)$")


def parse_gate_token(token: str, roles: QubitRoles = QubitRoles()) -> GateOp:
    """
    Parse one sequence token.

    Accepted forms: ``C1``, ``C2``, ``C3``, ``RT``, ``C:<spin>:<k>-<l>`` and
    ``R:<dot>``.

    Raises:
        ParameterError: For unknown tokens or non-adjacent dots.
    """
    named = {op.label: op for op in cnot_sequence(roles)}
    text = token.strip()
    if text in named:
        return named[text]
    match = _GENERAL_C.match(text)
    if match:
        spin, k, l = (int(group) for group in match.groups())
        return GateOp.optical(spin, k, l)
    match = _GENERAL_R.match(text)
    if match:
        return GateOp.magnetic(int(match.group(1)))
    raise ParameterError(f"unknown gate token '{token}'")


def parse_sequence(tokens: Sequence[str], roles: QubitRoles = QubitRoles()) -> list[GateOp]:
    return [parse_gate_token(token, roles) for token in tokens]


# =============================================================================
# Ideal Operators
# =============================================================================


def _hop_image(op: GateOp, config: Configuration) -> Configuration:
    k, l = op.dots  # type: ignore[misc]
    for mover, other in ((config[0], config[1]), (config[1], config[0])):
        dot, spin = mover
        if spin != op.spin or dot not in (k, l):
            continue
        destination = l if dot == k else k
        # both ends carry spin i: Pauli blocked
        if other == (destination, spin):
            return config
        if other[0] == dot or other[0] == destination:
            return config
        return configuration((destination, spin), other)
    return config


def _flip_image(dot: int, config: Configuration) -> Configuration | None:
    """Configuration with the lone electron of ``dot`` flipped, or None."""
    inside = [orbital for orbital in config if orbital[0] == dot]
    if len(inside) != 1:
        return None
    mover = inside[0]
    other = config[1] if config[0] == mover else config[0]
    return configuration((dot, 1 - mover[1]), other)


def rotation_matrix(angle: float) -> np.ndarray:
    """
    Single-spin rotation U(θ) = e^{iθ/2}·exp(-iθσx/2).

    U(π) is the real swap of |0⟩ and |1⟩ and U(2π) is the identity.
    """
    phase = cmath.exp(1j * angle)
    stay = (1.0 + phase) / 2.0
    flip = (1.0 - phase) / 2.0
    return np.array([[stay, flip], [flip, stay]], dtype=complex)


def rotate_qubit(amplitudes: Sequence[complex], angle: float) -> np.ndarray:
    """Apply U(angle) to a single-qubit amplitude pair (|0⟩, |1⟩)."""
    vector = np.asarray(amplitudes, dtype=complex)
    if vector.shape != (2,):
        raise ParameterError("a single qubit has exactly two amplitudes")
    return rotation_matrix(angle) @ vector


def one_bit_rotation(state: TwoElectronState, dot: int, angle: float) -> TwoElectronState:
    """
    Rotate the spin of the electron in ``dot`` by ``angle``.

    Configurations with no electron, or two electrons, in the dot are left
    unchanged.
    """
    basis = state.basis
    if not 0 <= dot < basis.n_dots:
        raise ParameterError(f"dot {dot} out of range for {basis.n_dots} dots")
    out = np.zeros(len(basis), dtype=complex)
    for idx, (config, amp) in enumerate(zip(basis.states, state.amplitudes)):
        flipped = _flip_image(dot, config)
        if flipped is None or flipped not in basis:
            out[idx] += amp
            continue
        stay, flip = rotate_qubit((amp, 0.0), angle)
        out[idx] += stay
        out[basis.index(flipped)] += flip
    return TwoElectronState(basis, out)


def apply_ideal(op: GateOp, state: TwoElectronState) -> TwoElectronState:
    """
    Apply one ideal gate as a permutation of configurations.

    Raises:
        ParameterError: If the gate addresses a dot outside the stack.
    """
    basis = state.basis
    if op.max_dot() >= basis.n_dots:
        raise ParameterError(f"gate {op.label} addresses a dot outside {basis.n_dots} dots")
    if op.kind is GateKind.MAGNETIC:
        return one_bit_rotation(state, op.target, np.pi)  # type: ignore[arg-type]
    out = np.zeros(len(basis), dtype=complex)
    for config, amp in zip(basis.states, state.amplitudes):
        image = _hop_image(op, config)
        out[basis.index(image if image in basis else config)] += amp
    return TwoElectronState(basis, out)


def apply_sequence(
    sequence: Sequence[GateOp], state: TwoElectronState, record: bool = False
) -> TwoElectronState | tuple[TwoElectronState, list[TwoElectronState]]:
    """Apply gates in time order; optionally return every intermediate state."""
    steps = []
    for op in sequence:
        state = apply_ideal(op, state)
        steps.append(state)
    return (state, steps) if record else state


def product_state(
    basis: TwoElectronBasis,
    roles: QubitRoles = QubitRoles(),
    control: Sequence[complex] = (1.0, 0.0),
    target: Sequence[complex] = (1.0, 0.0),
) -> TwoElectronState:
    """(α|0⟩_C + β|1⟩_C)(γ|0⟩_T + δ|1⟩_T) with the swap dot empty."""
    amplitudes = {}
    for sc, a in enumerate(control):
        for st, b in enumerate(target):
            config = configuration((roles.control, sc), (roles.target, st))
            amplitudes[config] = complex(a) * complex(b)
    return TwoElectronState.from_mapping(basis, amplitudes)


def cnot_ideal(
    state: TwoElectronState, roles: QubitRoles = QubitRoles(), record: bool = False
) -> TwoElectronState | tuple[TwoElectronState, list[TwoElectronState]]:
    """
    Controlled-NOT by the seven-pulse hop sequence.

    Args:
        state: One electron in the control dot, one in the target dot.
        roles: Stack indices of control, swap and target.
        record: Also return the seven intermediate states.

    Raises:
        ContractError: If any configuration with weight deviates from one
            electron in C and one in T.
    """
    for config, pop in zip(state.basis.states, state.populations()):
        if pop > 1e-12 and {config[0][0], config[1][0]} != {roles.control, roles.target}:
            raise ContractError(
                f"controlled-NOT needs one electron in dot {roles.control}, one in dot "
                f"{roles.target} and an empty swap dot; found {config}"
            )
    return apply_sequence(cnot_sequence(roles), state, record=record)
