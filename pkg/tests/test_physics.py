"""Tests for qdstack.physics: band models, finite wells and spherical dots."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, optimize

from qdstack.exceptions import ParameterError, UnboundStateError
from qdstack.physics import (
    DEFAULT_CONSTANTS,
    DEFAULT_MATERIALS,
    DotGeometry,
    EnergyReference,
    MaterialParams,
    PhysicalConstants,
    band_offset,
    bulk_g,
    dot_g,
    dot_ground_energy,
    eff_mass,
    get_material,
    lateral_energy,
    matching_residual,
    solve_well,
    sphere_g,
    sweep_half_widths,
)

C = DEFAULT_CONSTANTS.hbar2_over_2m0


class TestMaterials:
    """Roth g-factor, Kane mass and the default material table."""

    @pytest.mark.parametrize(
        "name, g_edge", [("InAs", -14.9), ("GaAs", -0.44), ("AlGaAs35", 0.5)]
    )
    def test_calibrated_band_edge_g(self, name, g_edge):
        assert bulk_g(DEFAULT_MATERIALS[name], 0.0) == pytest.approx(g_edge, abs=1e-12)

    @pytest.mark.parametrize("name", sorted(DEFAULT_MATERIALS))
    def test_band_edge_mass(self, name):
        material = DEFAULT_MATERIALS[name]
        assert eff_mass(material, 0.0) == pytest.approx(material.m_band_edge, rel=1e-12)

    @pytest.mark.parametrize("name", sorted(DEFAULT_MATERIALS))
    def test_g_and_mass_grow_with_energy(self, name):
        material = DEFAULT_MATERIALS[name]
        energies = np.linspace(0.0, 400.0, 41)
        g = [bulk_g(material, E) for E in energies]
        m = [eff_mass(material, E) for E in energies]
        assert np.all(np.diff(g) > 0)
        assert np.all(np.diff(m) > 0)

    def test_negative_energy_rejected(self, inas):
        with pytest.raises(ParameterError):
            bulk_g(inas, -1.0)
        with pytest.raises(ParameterError):
            eff_mass(inas, -1.0)

    def test_band_offsets(self, inas, gaas, algaas):
        assert band_offset(inas, gaas) == pytest.approx(450.0)
        assert band_offset(gaas, algaas) == pytest.approx(262.0)

    def test_override_recalibrates_g_remote(self, gaas):
        changed = gaas.with_overrides({"E_P": 25000.0, "bulk_g0": -0.3})
        assert changed.E_P == 25000.0
        assert bulk_g(changed, 0.0) == pytest.approx(-0.3, abs=1e-12)
        assert changed.g_remote != gaas.g_remote

    def test_override_unknown_field(self, gaas):
        with pytest.raises(ParameterError, match="unknown material fields"):
            gaas.with_overrides({"lattice_constant": 0.565})

    def test_unknown_material_lists_known_names(self):
        with pytest.raises(ParameterError, match="InAs"):
            get_material("InSb")

    @pytest.mark.parametrize(
        "field, value", [("E_g", 0.0), ("Delta_so", -1.0), ("E_P", -5.0), ("m_band_edge", 0.0)]
    )
    def test_invalid_band_parameters(self, field, value):
        params = dict(
            name="X", E_g=1000.0, Delta_so=300.0, E_P=20000.0, g_remote=0.0, DeltaE_c=0.0,
            m_band_edge=0.05,
        )
        params[field] = value
        with pytest.raises(ParameterError):
            MaterialParams(**params)

    def test_constants_must_be_positive(self):
        with pytest.raises(ParameterError):
            PhysicalConstants(hbar=0.0)


class TestFiniteWell:
    """Even ground state of the z well and the disk-dot g-factor."""

    def test_residual_vanishes_at_root(self, inas, gaas):
        geometry = DotGeometry(4.0, 10.0, inas, gaas)
        solution = solve_well(geometry)
        assert abs(matching_residual(geometry, solution.E_z)) < 1e-10
        assert 0.0 < solution.E_z < geometry.band_offset

    @pytest.mark.parametrize("d", [1.0, 2.0, 4.0, 8.0, 12.0])
    def test_weights_partition_unity(self, inas, gaas, d):
        solution = solve_well(DotGeometry(d, 10.0, inas, gaas))
        assert 0.0 < solution.w_A < 1.0
        assert solution.w_A + solution.w_B == pytest.approx(1.0, abs=1e-14)

    def test_matches_independent_root_finder(self, parabolic_material):
        well = parabolic_material("A", 0.023, 0.0)
        barrier = parabolic_material("B", 0.067, 450.0)
        d = 2.0

        def tan_form(E):
            k = math.sqrt(0.023 * E / C)
            kappa = math.sqrt(0.067 * (450.0 - E) / C)
            return k / 0.023 * math.tan(k * d) - kappa / 0.067

        E_pole = C * (math.pi / (2 * d)) ** 2 / 0.023
        expected = optimize.brentq(tan_form, 1e-9, min(450.0, E_pole) * (1 - 1e-12), xtol=1e-13)
        solution = solve_well(DotGeometry(d, math.inf, well, barrier))
        assert solution.E_z == pytest.approx(expected, abs=1e-8)

    def test_deep_well_approaches_infinite_well(self, parabolic_material):
        well = parabolic_material("A", 0.067, 0.0)
        barrier = parabolic_material("B", 0.067, 1e6)
        solution = solve_well(DotGeometry(10.0, math.inf, well, barrier))
        assert solution.E_z == pytest.approx(C * (math.pi / 20.0) ** 2 / 0.067, rel=1e-2)

    def test_energy_falls_and_g_tends_to_bulk_with_width(self, inas, gaas):
        frame = sweep_half_widths(inas, gaas, 10.0, [2.0, 4.0, 8.0, 12.0])
        assert list(frame.columns) == ["half_width_nm", "E_z_meV", "E_k_meV", "w_A", "g"]
        assert np.all(np.diff(frame["E_z_meV"]) < 0)
        assert np.all(np.diff(frame["w_A"]) > 0)
        assert np.all(np.diff(frame["g"]) < 0)
        assert frame["g"].between(-14.9, -0.44).all()

    def test_ground_energy_adds_lateral_term(self, inas, gaas):
        geometry = DotGeometry(4.0, 10.0, inas, gaas)
        solution = solve_well(geometry)
        expected = solution.E_z + lateral_energy(geometry, solution.E_z)
        assert dot_ground_energy(geometry) == pytest.approx(expected, rel=1e-12)
        assert lateral_energy(geometry, solution.E_z) > 0

    def test_lateral_energy_scaling(self, inas, gaas):
        wide = DotGeometry(4.0, 20.0, inas, gaas)
        narrow = DotGeometry(4.0, 10.0, inas, gaas)
        assert lateral_energy(narrow, 50.0) == pytest.approx(4 * lateral_energy(wide, 50.0))
        assert lateral_energy(DotGeometry(4.0, math.inf, inas, gaas), 50.0) == 0.0

    def test_wide_well_is_shallow(self, inas, gaas):
        assert solve_well(DotGeometry(50.0, 10.0, inas, gaas)).E_z < 5.0

    def test_g_is_hand_weighted_average(self, inas, gaas):
        geometry = DotGeometry(2.0, 10.0, inas, gaas)
        s = solve_well(geometry)
        inside = integrate.quad(lambda z: math.cos(s.k * z) ** 2, -2.0, 2.0)[0]
        tail = integrate.quad(lambda z: math.exp(-2.0 * s.kappa * (z - 2.0)), 2.0, math.inf)[0]
        outside = 2.0 * math.cos(s.k * 2.0) ** 2 * tail
        w_A = inside / (inside + outside)
        expected = w_A * bulk_g(inas, s.E_z) + (1.0 - w_A) * bulk_g(gaas, s.E_z)
        assert dot_g(geometry) == pytest.approx(expected, abs=1e-9)

    def test_g_ignores_envelope_scale(self, inas, gaas):
        geometry = DotGeometry(3.0, 10.0, inas, gaas)
        s = solve_well(geometry)
        scaled = replace(s, w_A=7.5 * s.w_A, w_B=7.5 * s.w_B)
        assert dot_g(geometry, solution=scaled) == pytest.approx(
            dot_g(geometry, solution=s), abs=1e-12
        )

    def test_g_reference_choice_changes_result(self, inas, gaas):
        geometry = DotGeometry(2.0, 10.0, inas, gaas)
        own = dot_g(geometry)
        edge = dot_g(geometry, energy_reference=EnergyReference.BARRIER_EDGE)
        assert math.isfinite(edge)
        assert edge != pytest.approx(own, abs=1e-6)

    @pytest.mark.parametrize("d", [0.0, -1.0, math.nan])
    def test_invalid_half_width(self, inas, gaas, d):
        with pytest.raises(ParameterError):
            DotGeometry(d, 10.0, inas, gaas)

    def test_inverted_offset_rejected(self, inas, gaas):
        with pytest.raises(ParameterError, match="band offset"):
            solve_well(DotGeometry(4.0, 10.0, gaas, inas))


class TestSphere:
    """Spherical dot g-factor and its term decomposition (GaAs in AlGaAs)."""

    @pytest.mark.parametrize("R", [5.0, 8.0, 15.0])
    def test_terms_sum_to_total(self, gaas, algaas, R):
        result = sphere_g(R, gaas, algaas)
        total = DEFAULT_CONSTANTS.g0 + result.term_A + result.term_B + result.term_surface
        assert result.g == pytest.approx(total, abs=1e-12)
        assert result.w_A + result.w_B == pytest.approx(1.0, abs=1e-14)
        assert 0.0 < result.E < 262.0

    def test_g_falls_through_zero_toward_bulk(self, gaas, algaas):
        radii = np.arange(5.0, 15.5, 1.0)
        g = np.array([sphere_g(R, gaas, algaas).g for R in radii])
        assert np.all(np.diff(g) < 0)
        assert g[0] > 0 > g[-1]
        # the published span is -0.25 .. 0.3 over 5-15 nm
        assert 0.1 <= g[0] <= 0.5
        assert -0.45 <= g[-1] <= -0.05
        assert g[0] == pytest.approx(0.16, abs=0.03)
        assert g[-1] == pytest.approx(-0.32, abs=0.03)

    def test_matches_independent_evaluation_at_ten_nm(self, gaas, algaas):
        R = 10.0
        offset = band_offset(gaas, algaas)

        def wavenumbers(E):
            q = math.sqrt(eff_mass(gaas, E) * E / C)
            kappa = math.sqrt(eff_mass(algaas, E) * (offset - E) / C)
            return q, kappa

        def cot_form(E):
            q, kappa = wavenumbers(E)
            ratio = eff_mass(gaas, E) / eff_mass(algaas, E)
            return q * R / math.tan(q * R) - (1.0 - ratio * (1.0 + kappa * R))

        grid = [E for E in np.linspace(1e-3, offset - 1e-3, 4001) if wavenumbers(E)[0] * R < 3.14]
        values = [cot_form(E) for E in grid]
        i = next(i for i in range(len(values) - 1) if values[i] > 0 >= values[i + 1])
        E = optimize.brentq(cot_form, grid[i], grid[i + 1], xtol=1e-13)

        q, kappa = wavenumbers(E)
        inside = integrate.quad(lambda r: math.sin(q * r) ** 2, 0.0, R)[0]
        tail = integrate.quad(lambda r: math.exp(-2.0 * kappa * (r - R)), R, math.inf)[0]
        norm = inside + math.sin(q * R) ** 2 * tail
        w_A = inside / norm
        f2_R = math.sin(q * R) ** 2 / (R**2 * 4.0 * math.pi * norm)
        volume = 4.0 / 3.0 * math.pi * R**3
        g0 = DEFAULT_CONSTANTS.g0
        g_A, g_B = bulk_g(gaas, E), bulk_g(algaas, E)
        expected = (
            g0 + (g_A - g0) * w_A + (g_B - g0) * (1.0 - w_A) + (g_B - g_A) * volume * f2_R
        )

        result = sphere_g(R, gaas, algaas)
        assert result.E == pytest.approx(E, abs=1e-8)
        assert result.g == pytest.approx(expected, abs=1e-8)

    def test_large_sphere_tends_to_bulk(self, gaas, algaas):
        assert sphere_g(100.0, gaas, algaas).g == pytest.approx(-0.44, abs=0.02)

    def test_surface_term_positive(self, gaas, algaas):
        # barrier g above well g, so the interface pushes g up
        result = sphere_g(6.0, gaas, algaas)
        assert result.term_surface > 0

    def test_tiny_sphere_unbound(self, gaas, algaas):
        with pytest.raises(UnboundStateError):
            sphere_g(0.3, gaas, algaas)

    def test_nonpositive_radius(self, gaas, algaas):
        with pytest.raises(ParameterError):
            sphere_g(0.0, gaas, algaas)
