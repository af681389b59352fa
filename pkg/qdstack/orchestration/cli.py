"""
qdstack command line.

Every subcommand builds a pandas DataFrame and writes it as CSV (9
significant digits) to stdout or ``--output``. Domain and numerical errors
exit with 1, configuration and usage errors with 2, interrupts with 130.

Usage:
    qdstack g-factor --material InAs --energy-mev 0 50 100
    qdstack levels --half-widths-nm 4 8 5 --b-tesla 10
    qdstack check --tsw-ps 10
    qdstack gate --mode pulsed --u-mev 50
    qdstack design --n-dots 9 --json-out design.json
    qdstack validate --fixture table1 --tsw-ps 10
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from qdstack import __version__
from qdstack.design.designer import (
    design_stack,
    load_table1,
    validate_stack,
    validate_transitions,
)
from qdstack.dynamics.rabi import TwoLevelPulse, two_level_population
from qdstack.dynamics.vee import VeeSpec, evolve_two_level, evolve_vee
from qdstack.exceptions import ConfigError, QdStackError
from qdstack.gates.basis import BasisMode, enumerate_basis
from qdstack.gates.ideal import apply_sequence, cnot_ideal, parse_sequence, product_state
from qdstack.gates.pulsed import CNOT_INPUTS, cnot_fidelity_report
from qdstack.orchestration.config import RunConfig, configure_logging
from qdstack.physics.dots import (
    EnergyReference,
    dot_g,
    dot_ground_energy,
    solve_well,
    sphere_g,
)
from qdstack.physics.materials import bulk_g, eff_mass
from qdstack.spectrum.levels import StackDesign, level_table
from qdstack.spectrum.selectivity import check_optical_selectivity, check_rotation_selectivity

CSV_FLOAT_FORMAT = "%.9g"
DEFAULT_SPHERE_RADII_NM = (5.0, 7.5, 10.0, 12.5, 15.0)
DEFAULT_PULSE_SAMPLES = 201

EPILOG = """
Examples:
  qdstack g-factor --material InAs --energy-mev 0 50 100
  qdstack sphere-g --radius-nm 5 10 15
  qdstack levels --half-widths-nm 4 8 5
  qdstack check --tsw-ps 10
  qdstack vee --rabi12-mev 0.2078 --det13-mev 0.72 --duration-ps 12
  qdstack gate --mode ideal --input 10
  qdstack design --n-dots 3 --seed 0
  qdstack validate --fixture table1 --tsw-ps 10
"""


# =============================================================================
# Output
# =============================================================================


def write_frame(frame: pd.DataFrame, output: str | None) -> None:
    """Write a CSV table to ``output`` or stdout."""
    text = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def write_json(payload: dict, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


# =============================================================================
# Subcommands
# =============================================================================


def _stack(args: argparse.Namespace, config: RunConfig) -> StackDesign:
    return config.stack_design(
        half_widths=args.half_widths_nm,
        B=args.b_tesla,
        B1=args.b1_tesla,
        T_sw=args.tsw_ps,
        lateral_nm=args.lateral_nm,
        well=args.well,
        barrier=args.barrier,
    )


def cmd_g_factor(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    material = config.material(args.material)
    return pd.DataFrame(
        [
            {
                "material": material.name,
                "energy_meV": energy,
                "g": bulk_g(material, energy),
                "mass_m0": eff_mass(material, energy),
            }
            for energy in args.energy_mev
        ],
        columns=["material", "energy_meV", "g", "mass_m0"],
    )


def cmd_sphere_g(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    well, barrier = config.material(args.well), config.material(args.barrier)
    rows = []
    for radius in args.radius_nm:
        result = sphere_g(radius, well, barrier)
        rows.append(
            {
                "radius_nm": result.radius,
                "energy_meV": result.E,
                "w_A": result.w_A,
                "w_B": result.w_B,
                "surface_weight": result.surface_weight,
                "term_A": result.term_A,
                "term_B": result.term_B,
                "term_surface": result.term_surface,
                "g": result.g,
            }
        )
    return pd.DataFrame(rows)


def cmd_well_solve(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    stack = _stack(args, config)
    reference = EnergyReference(args.energy_reference)
    rows = []
    for dot in stack.dots:
        solution = solve_well(dot)
        rows.append(
            {
                "half_width_nm": dot.half_width_d,
                "E_z_meV": solution.E_z,
                "k_per_nm": solution.k,
                "kappa_per_nm": solution.kappa,
                "w_A": solution.w_A,
                "w_B": solution.w_B,
                "E_k_meV": dot_ground_energy(dot, solution=solution),
                "g": dot_g(dot, solution=solution, energy_reference=reference),
                "barely_bound": solution.barely_bound,
            }
        )
    return pd.DataFrame(rows)


def cmd_levels(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    stack = _stack(args, config)
    frame = level_table(stack).to_frame()
    frame.insert(1, "half_width_nm", stack.half_widths)
    return frame


def cmd_transitions(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    report = validate_stack(_stack(args, config))
    return report.to_frame().drop(columns=["pass17"])


def cmd_check(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    stack = _stack(args, config)
    table = level_table(stack)
    reports = {
        "rotation": check_rotation_selectivity(stack, table),
        "optical": check_optical_selectivity(table, stack.T_sw, strict=not args.non_strict),
    }
    return pd.DataFrame(
        [
            {
                "requirement": name,
                "pass": report.passed,
                "margin_meV": report.margin_meV,
                "normalized_margin": report.normalized_margin,
                "violations": "; ".join(v.subject for v in report.violations),
            }
            for name, report in reports.items()
        ],
        columns=["requirement", "pass", "margin_meV", "normalized_margin", "violations"],
    )


def cmd_pulse(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    if args.rabi_mev is not None:
        pulse = TwoLevelPulse(args.rabi_mev, args.detuning_mev or 0.0, args.duration_ps)
    else:
        configured = config.pulses_of(TwoLevelPulse)
        if not configured:
            raise ConfigError("pulse needs --rabi-mev or a two_level entry in the config pulses")
        pulse = configured[0]
    if args.numerical:
        trace = evolve_two_level(pulse)
        return pd.DataFrame({"t_ps": trace.times, "p_excited": trace.column("p2")})
    times = np.linspace(0.0, pulse.duration, args.samples)
    return pd.DataFrame({"t_ps": times, "p_excited": two_level_population(pulse, times)})


def cmd_vee(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    if args.rabi12_mev is not None:
        if args.det13_mev is None or args.duration_ps is None:
            raise ConfigError("vee needs --det13-mev and --duration-ps with --rabi12-mev")
        spec = VeeSpec(
            rabi_12=args.rabi12_mev,
            rabi_13=args.rabi13_mev,
            detuning_13=args.det13_mev,
            detuning_12=args.det12_mev or 0.0,
            duration=args.duration_ps,
            dt=args.dt_ps,
            sample_every=args.sample_every,
        )
    else:
        configured = config.pulses_of(VeeSpec)
        if not configured:
            raise ConfigError("vee needs --rabi12-mev or a vee entry in the config pulses")
        spec = configured[0]
    return evolve_vee(spec).to_frame()


def cmd_gate(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    roles = config.qubit_roles()
    sequence = (
        parse_sequence(args.sequence, roles) if args.sequence else config.gate_sequence()
    )
    stack = _stack(args, config)
    if args.mode == "ideal":
        basis = enumerate_basis(stack.n_dots, BasisMode.STRICT)
        control, target = CNOT_INPUTS[args.input or "10"]
        state = product_state(basis, roles, control, target)
        final = cnot_ideal(state, roles) if sequence is None else apply_sequence(sequence, state)
        return pd.DataFrame(final.to_rows(), columns=["state", "re", "im", "population"])

    U = args.u_mev if args.u_mev is not None else config.stack.coulomb_u_mev
    report, traces = cnot_fidelity_report(
        level_table(stack),
        U=U,
        T_sw=stack.T_sw,
        B1=stack.B1,
        roles=roles,
        sequence=sequence,
        inputs=[args.input] if args.input else None,
        dt=args.dt_ps,
        progress=args.progress,
    )
    if args.trace_out:
        frames = []
        for label, trace in traces.items():
            frame = trace.to_frame()
            frame.insert(0, "input", label)
            frames.append(frame)
        write_frame(pd.concat(frames, ignore_index=True), args.trace_out)
    return report.to_frame()


def cmd_design(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    bounds = None
    if args.d_min_nm is not None or args.d_max_nm is not None:
        d_min, d_max = config.design.bounds_nm
        bounds = (
            args.d_min_nm if args.d_min_nm is not None else d_min,
            args.d_max_nm if args.d_max_nm is not None else d_max,
        )
    problem = config.design_problem(
        n_dots=args.n_dots,
        seed=args.seed,
        n_starts=args.n_starts,
        max_iterations=args.max_iterations,
        grid_step=args.grid_step_nm,
        bounds=bounds,
        B=args.b_tesla,
        B1=args.b1_tesla,
        T_sw=args.tsw_ps,
        d_lt=args.lateral_nm,
        well=config.material(args.well) if args.well else None,
        barrier=config.material(args.barrier) if args.barrier else None,
    )
    report = design_stack(problem, progress=args.progress)
    json_out = args.json_out or config.output.json_path
    if json_out:
        write_json(report.to_dict(), json_out)
    return report.to_frame()


def cmd_validate(args: argparse.Namespace, config: RunConfig) -> pd.DataFrame:
    if args.table:
        try:
            frame = pd.read_csv(args.table, dtype={"k-l": str}, float_precision="round_trip")
        except (OSError, pd.errors.ParserError) as exc:
            raise ConfigError(f"cannot read transition table {args.table}: {exc}") from None
    else:
        frame = load_table1()
    T_sw = args.tsw_ps if args.tsw_ps is not None else config.stack.tsw_ps
    report = validate_transitions(frame, T_sw=T_sw, strict=not args.non_strict)
    return report.to_frame()


COMMANDS: dict[str, Callable[[argparse.Namespace, RunConfig], pd.DataFrame]] = {
    "g-factor": cmd_g_factor,
    "sphere-g": cmd_sphere_g,
    "well-solve": cmd_well_solve,
    "levels": cmd_levels,
    "transitions": cmd_transitions,
    "check": cmd_check,
    "pulse": cmd_pulse,
    "vee": cmd_vee,
    "gate": cmd_gate,
    "design": cmd_design,
    "validate": cmd_validate,
}


# =============================================================================
# Parser
# =============================================================================


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="JSON or YAML run configuration")
    common.add_argument("--output", "-o", help="Write the CSV here instead of stdout")
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level on stderr (default: WARNING)",
    )
    common.add_argument("--progress", action="store_true", help="Show progress bars on stderr")
    return common


def _stack_options() -> argparse.ArgumentParser:
    stack = argparse.ArgumentParser(add_help=False)
    stack.add_argument("--half-widths-nm", type=float, nargs="+", help="Dot half-widths (nm)")
    stack.add_argument("--lateral-nm", type=float, help="Lateral extension d_lt (nm)")
    stack.add_argument("--well", help="Dot material name")
    stack.add_argument("--barrier", help="Barrier material name")
    stack.add_argument("--b-tesla", type=float, help="Static field B (T)")
    stack.add_argument("--b1-tesla", type=float, help="Rotational field B1 (T)")
    stack.add_argument("--tsw-ps", type=float, help="Optical switching time (ps)")
    return stack


def build_parser() -> argparse.ArgumentParser:
    """The full argparse surface."""
    parser = argparse.ArgumentParser(
        prog="qdstack",
        description="Spin-qubit quantum-dot stack simulator and designer",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_options()
    stack = _stack_options()
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    sub = commands.add_parser(
        "g-factor", parents=[common], help="Bulk g-factor and mass versus energy"
    )
    sub.add_argument("--material", default="InAs", help="Material name (default: InAs)")
    sub.add_argument(
        "--energy-mev", type=float, nargs="+", default=[0.0], help="Energies above the band edge"
    )

    sub = commands.add_parser(
        "sphere-g", parents=[common], help="Spherical-dot g-factor decomposition"
    )
    sub.add_argument(
        "--radius-nm", type=float, nargs="+", default=list(DEFAULT_SPHERE_RADII_NM)
    )
    sub.add_argument("--well", default="GaAs", help="Dot material (default: GaAs)")
    sub.add_argument("--barrier", default="AlGaAs35", help="Matrix material (default: AlGaAs35)")

    sub = commands.add_parser(
        "well-solve", parents=[common, stack], help="Finite-well ground state of each dot"
    )
    sub.add_argument(
        "--energy-reference",
        choices=[ref.value for ref in EnergyReference],
        default=EnergyReference.OWN_BAND_EDGE.value,
        help="Energy origin of the barrier g-factor",
    )

    commands.add_parser("levels", parents=[common, stack], help="Zeeman-split level table")
    commands.add_parser(
        "transitions", parents=[common, stack], help="Adjacent-pair optical transitions"
    )

    sub = commands.add_parser(
        "check", parents=[common, stack], help="Rotation and optical selectivity"
    )
    sub.add_argument("--non-strict", action="store_true", help="Cross talk only between neighbours")

    sub = commands.add_parser("pulse", parents=[common], help="Two-level Rabi population")
    sub.add_argument("--rabi-mev", type=float, help="Rabi energy ħΩ (meV)")
    sub.add_argument("--detuning-mev", type=float, help="Detuning ħΔ (meV)")
    sub.add_argument("--duration-ps", type=float, help="Pulse length (default: π pulse)")
    sub.add_argument("--samples", type=int, default=DEFAULT_PULSE_SAMPLES)
    sub.add_argument("--numerical", action="store_true", help="Integrate instead of closed form")

    sub = commands.add_parser("vee", parents=[common], help="Three-level Vee leakage trace")
    sub.add_argument("--rabi12-mev", type=float, help="Addressed Rabi energy (meV)")
    sub.add_argument("--rabi13-mev", type=float, help="Leakage Rabi energy (default: rabi12)")
    sub.add_argument("--det13-mev", type=float, help="Leakage detuning (meV)")
    sub.add_argument("--det12-mev", type=float, help="Addressed detuning (meV)")
    sub.add_argument("--duration-ps", type=float, help="Pulse length (ps)")
    sub.add_argument("--dt-ps", type=float, help="RK4 step (ps)")
    sub.add_argument("--sample-every", type=int, default=10, help="Keep every n-th step")

    sub = commands.add_parser(
        "gate", parents=[common, stack], help="Ideal or pulsed gate sequence"
    )
    sub.add_argument("--mode", choices=["ideal", "pulsed"], default="ideal")
    sub.add_argument("--input", choices=list(CNOT_INPUTS), help="Product-state input")
    sub.add_argument("--sequence", nargs="+", help="Gate tokens (default: controlled-NOT)")
    sub.add_argument("--u-mev", type=float, help="On-site energy U (meV)")
    sub.add_argument("--dt-ps", type=float, help="Propagation step (ps)")
    sub.add_argument("--trace-out", help="Write the pulsed population trace here")

    sub = commands.add_parser(
        "design", parents=[common, stack], help="Search for a selective stack"
    )
    sub.add_argument("--n-dots", type=int, help="Number of dots")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--n-starts", type=int)
    sub.add_argument("--max-iterations", type=int)
    sub.add_argument("--d-min-nm", type=float)
    sub.add_argument("--d-max-nm", type=float)
    sub.add_argument("--grid-step-nm", type=float)
    sub.add_argument("--json-out", help="Write the JSON report here")

    sub = commands.add_parser(
        "validate", parents=[common], help="Check a published transition table"
    )
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--fixture", choices=["table1"], help="Embedded transition table")
    source.add_argument("--table", help="CSV with k-l,dE00_meV,dE11_meV")
    sub.add_argument("--tsw-ps", type=float, help="Optical switching time (ps)")
    sub.add_argument("--non-strict", action="store_true", help="Cross talk only between neighbours")
    return parser


# =============================================================================
# Entry Points
# =============================================================================


def run(argv: Sequence[str] | None = None) -> int:
    """
    Execute one command and return its exit code.

    Returns:
        0 on success, 1 on domain or numerical errors, 2 on usage or
        configuration errors, 130 when interrupted.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 2)

    try:
        config = RunConfig.load(args.config) if args.config else RunConfig()
        configure_logging(
            args.log_level or config.logging.level, config.logging.format, config.logging.file
        )
        frame = COMMANDS[args.command](args, config)
        write_frame(frame, args.output or config.output.path)
        return 0
    except ConfigError as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        return 2
    except QdStackError as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("\n[ERROR] Interrupted by user.", file=sys.stderr)
        return 130


def main() -> int:
    """Console-script entry point."""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
