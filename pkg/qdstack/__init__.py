"""
qdstack - Spin-qubit quantum-dot stack simulator and designer.

Simulates electron spin qubits in a vertical stack of InAs/GaAs quantum
dots driven by optical hops and magnetic rotations.

The package consists of the following layers:
    1. physics: Bulk band models, finite-well and spherical-dot g-factors
    2. spectrum: Zeeman-split level tables and selectivity requirements
    3. dynamics: Rabi formulas, Vee leakage and time integrators
    4. gates: Two-electron basis, ideal and pulsed gate sequences
    5. design: Multi-start search for selective stack geometries
    6. orchestration: Run configuration and the command line

Example:
    >>> from qdstack.physics import DEFAULT_MATERIALS, bulk_g
    >>> round(bulk_g(DEFAULT_MATERIALS["InAs"], 0.0), 1)
    -14.9

For CLI usage:
    $ qdstack --help
    $ python scripts/run_qdstack.py validate --fixture table1
"""

from __future__ import annotations

import importlib
from typing import Any

__version__ = "0.1.0"
__author__ = "qdstack contributors"
__email__ = ""

_SUBPACKAGES = ("physics", "spectrum", "dynamics", "gates", "design", "orchestration")

__all__ = [
    "__version__",
    "__author__",
    *_SUBPACKAGES,
]


def __getattr__(name: str) -> Any:
    # Subpackages load on first access
    if name in _SUBPACKAGES:
        module = importlib.import_module(f"qdstack.{name}")
        globals()[name] = module
        return module
    raise AttributeError(f"module 'qdstack' has no attribute '{name}'")
