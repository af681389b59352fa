"""
Two-electron gate layer.

Modules:
    basis: Configuration basis and state container
    ideal: Permutation-level hops, rotations and the controlled-NOT
    pulsed: Resonant-pulse simulation with leakage and fidelity reporting
"""

from qdstack.gates.basis import (
    BasisMode,
    TwoElectronBasis,
    TwoElectronState,
    config_label,
    configuration,
    enumerate_basis,
    fidelity,
)
from qdstack.gates.ideal import (
    GateKind,
    GateOp,
    QubitRoles,
    apply_ideal,
    apply_sequence,
    cnot_ideal,
    cnot_sequence,
    one_bit_rotation,
    parse_gate_token,
    parse_sequence,
    product_state,
    rotate_qubit,
    rotation_matrix,
)
from qdstack.gates.pulsed import (
    CNOT_INPUTS,
    DEFAULT_U_MEV,
    CnotFidelityReport,
    PulsedGateResult,
    PulseSpec,
    build_pulse,
    cnot_fidelity_report,
    evolve_pulsed,
    evolve_pulsed_table,
    pulse_hamiltonian,
)

__all__ = [
    "BasisMode",
    "CNOT_INPUTS",
    "CnotFidelityReport",
    "DEFAULT_U_MEV",
    "GateKind",
    "GateOp",
    "PulseSpec",
    "PulsedGateResult",
    "QubitRoles",
    "TwoElectronBasis",
    "TwoElectronState",
    "apply_ideal",
    "apply_sequence",
    "build_pulse",
    "cnot_fidelity_report",
    "cnot_ideal",
    "cnot_sequence",
    "config_label",
    "configuration",
    "enumerate_basis",
    "evolve_pulsed",
    "evolve_pulsed_table",
    "fidelity",
    "one_bit_rotation",
    "parse_gate_token",
    "parse_sequence",
    "product_state",
    "pulse_hamiltonian",
    "rotate_qubit",
    "rotation_matrix",
]
