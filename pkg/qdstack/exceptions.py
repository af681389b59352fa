"""
Error hierarchy for qdstack.

Library code raises these and never prints or exits; the command-line layer
maps them onto exit codes (see ``qdstack.orchestration.cli``).
"""

from __future__ import annotations


class QdStackError(Exception):
    """Base class for all qdstack errors."""


class ParameterError(QdStackError, ValueError):
    """Invalid physical input, index or token."""


class NumericalError(QdStackError, ArithmeticError):
    """Root bracketing failure, non-convergence or integrator drift."""


class UnboundStateError(NumericalError):
    """The requested confinement potential holds no bound ground state."""


class ContractError(QdStackError):
    """A gate sequence was applied to a state violating its preconditions."""


class ConfigError(QdStackError):
    """Malformed configuration document or command-line usage."""


__all__ = [
    "QdStackError",
    "ParameterError",
    "NumericalError",
    "UnboundStateError",
    "ContractError",
    "ConfigError",
]
