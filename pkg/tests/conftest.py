"""Shared fixtures for the qdstack test suite."""

from __future__ import annotations

import pytest

from qdstack.design.designer import load_table1
from qdstack.physics.materials import DEFAULT_MATERIALS, MaterialParams
from qdstack.spectrum.levels import SpinLevelTable, StackDesign


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: long-running searches and pulse simulations")


@pytest.fixture
def inas() -> MaterialParams:
    return DEFAULT_MATERIALS["InAs"]


@pytest.fixture
def gaas() -> MaterialParams:
    return DEFAULT_MATERIALS["GaAs"]


@pytest.fixture
def algaas() -> MaterialParams:
    return DEFAULT_MATERIALS["AlGaAs35"]


@pytest.fixture
def default_stack(inas: MaterialParams, gaas: MaterialParams) -> StackDesign:
    """Three InAs/GaAs dots with half-widths 4, 8 and 5 nm."""
    return StackDesign.from_half_widths([4.0, 8.0, 5.0], 10.0, inas, gaas)


@pytest.fixture
def scaled_table() -> SpinLevelTable:
    """Three-dot spectrum with every separation scaled up a thousandfold."""
    return SpinLevelTable.from_arrays(
        [100_000.0, 90_000.0, 105_000.0], [-12.0, -8.0, -13.0], 10_000.0
    )


@pytest.fixture
def table1():
    return load_table1()


@pytest.fixture
def parabolic_material():
    """Factory for materials with E_P = 0, whose mass stays at the band-edge value."""

    def build(name: str, mass: float, edge: float) -> MaterialParams:
        return MaterialParams(
            name=name, E_g=1000.0, Delta_so=300.0, E_P=0.0, g_remote=0.0, DeltaE_c=edge,
            m_band_edge=mass,
        )

    return build
