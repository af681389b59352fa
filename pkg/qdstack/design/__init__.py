"""
Stack design for qdstack.

Modules:
    designer: Multi-start lattice search and stack/table validation
"""

from qdstack.design.designer import (
    DesignProblem,
    DesignReport,
    design_stack,
    load_table1,
    validate_stack,
    validate_transitions,
)

__all__ = [
    "DesignProblem",
    "DesignReport",
    "design_stack",
    "load_table1",
    "validate_stack",
    "validate_transitions",
]
