"""
Run configuration for the qdstack command line.

A run is described by one JSON or YAML document with the sections
``materials``, ``stack``, ``pulses``, ``sequence``, ``design``, ``output``
and ``logging``. Every section is optional; missing keys take the defaults
below. Unknown keys and wrongly typed values raise ConfigError naming the
dotted key path, before any computation starts.

Main Classes:
    RunConfig: Validated configuration with builders for domain objects

Example:
    >>> from qdstack.orchestration.config import RunConfig
    >>> config = RunConfig.from_mapping({"stack": {"half_widths_nm": [4.0, 8.0, 5.0]}})
    >>> config.stack_design().n_dots
    3
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from qdstack.design.designer import (
    DEFAULT_BOUNDS_NM,
    DEFAULT_GRID_STEP_NM,
    DEFAULT_LATERAL_NM,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_N_STARTS,
    DesignProblem,
)
from qdstack.dynamics.rabi import TwoLevelPulse
from qdstack.dynamics.vee import VeeSpec
from qdstack.exceptions import ConfigError, ParameterError
from qdstack.gates.ideal import GateOp, QubitRoles, parse_sequence
from qdstack.gates.pulsed import DEFAULT_U_MEV
from qdstack.physics.materials import DEFAULT_MATERIALS, MaterialParams
from qdstack.spectrum.levels import (
    DEFAULT_B1_TESLA,
    DEFAULT_B_TESLA,
    DEFAULT_TSW_PS,
    StackDesign,
)

DEFAULT_HALF_WIDTHS_NM = (4.0, 8.0, 5.0)
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

MATERIAL_KEYS = {"E_g", "Delta_so", "E_P", "g_remote", "DeltaE_c", "m_band_edge", "bulk_g0"}
PULSE_KEYS = {
    "two_level": {
        "kind": str,
        "rabi_mev": float,
        "detuning_mev": float,
        "duration_ps": float,
    },
    "vee": {
        "kind": str,
        "rabi12_mev": float,
        "rabi13_mev": float,
        "det13_mev": float,
        "det12_mev": float,
        "duration_ps": float,
        "dt_ps": float,
    },
}


# =============================================================================
# Section Schemas
# =============================================================================


@dataclass
class StackConfig:
    half_widths_nm: list[float] = field(default_factory=lambda: list(DEFAULT_HALF_WIDTHS_NM))
    lateral_nm: float = DEFAULT_LATERAL_NM
    well: str = "InAs"
    barrier: str = "GaAs"
    b_tesla: float = DEFAULT_B_TESLA
    b1_tesla: float = DEFAULT_B1_TESLA
    tsw_ps: float = DEFAULT_TSW_PS
    coulomb_u_mev: float = DEFAULT_U_MEV
    roles: dict[str, int] = field(
        default_factory=lambda: {"control": 0, "swap": 1, "target": 2}
    )


@dataclass
class DesignConfig:
    n_dots: int = 3
    bounds_nm: list[float] = field(default_factory=lambda: list(DEFAULT_BOUNDS_NM))
    seed: int = 0
    n_starts: int = DEFAULT_N_STARTS
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    grid_step_nm: float = DEFAULT_GRID_STEP_NM
    strict: bool = True


@dataclass
class OutputConfig:
    path: str | None = None
    json_path: str | None = None


@dataclass
class LoggingConfig:
    level: str = DEFAULT_LOG_LEVEL
    format: str = DEFAULT_LOG_FORMAT
    file: str | None = None


SECTION_TYPES: dict[type, dict[str, Any]] = {
    StackConfig: {
        "half_widths_nm": [float],
        "lateral_nm": float,
        "well": str,
        "barrier": str,
        "b_tesla": float,
        "b1_tesla": float,
        "tsw_ps": float,
        "coulomb_u_mev": float,
        "roles": {"control": int, "swap": int, "target": int},
    },
    DesignConfig: {
        "n_dots": int,
        "bounds_nm": [float],
        "seed": int,
        "n_starts": int,
        "max_iterations": int,
        "grid_step_nm": float,
        "strict": bool,
    },
    OutputConfig: {"path": (str, None), "json_path": (str, None)},
    LoggingConfig: {"level": str, "format": str, "file": (str, None)},
}


def _check_type(value: Any, expected: Any, path: str) -> Any:
    """Validate one value against a schema entry and return it normalized."""
    if isinstance(expected, tuple):
        if value is None and None in expected:
            return None
        return _check_type(value, expected[0], path)
    if isinstance(expected, list):
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {type(value).__name__}")
        return [_check_type(item, expected[0], f"{path}[{i}]") for i, item in enumerate(value)]
    if isinstance(expected, dict):
        if not isinstance(value, Mapping):
            raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
        _reject_unknown(value, expected, path)
        return {
            key: _check_type(item, expected[key], f"{path}.{key}") for key, item in value.items()
        }
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, expected):
        raise ConfigError(f"{path}: expected {expected.__name__}, got {value!r}")
    return value


def _reject_unknown(data: Mapping[str, Any], allowed: Mapping[str, Any] | set, path: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        joined = ", ".join(f"{path}.{key}" if path else key for key in unknown)
        raise ConfigError(f"unknown configuration key(s): {joined}")


def _section(cls: type, data: Any, path: str) -> Any:
    if data is None:
        return cls()
    values = _check_type(data, SECTION_TYPES[cls], path)
    defaults = cls()
    for item in fields(cls):
        if isinstance(getattr(defaults, item.name), dict) and item.name in values:
            values[item.name] = {**getattr(defaults, item.name), **values[item.name]}
    return cls(**values)


def _materials(data: Any) -> dict[str, MaterialParams]:
    table = dict(DEFAULT_MATERIALS)
    if data is None:
        return table
    if not isinstance(data, Mapping):
        raise ConfigError("materials: expected a mapping of material names")
    for name, overrides in data.items():
        path = f"materials.{name}"
        values = _check_type(overrides, {key: float for key in MATERIAL_KEYS}, path)
        try:
            if name in table:
                table[name] = table[name].with_overrides(values)
            elif "bulk_g0" in values:
                table[name] = MaterialParams.calibrated(
                    name,
                    E_g=values["E_g"],
                    Delta_so=values["Delta_so"],
                    E_P=values["E_P"],
                    m_band_edge=values["m_band_edge"],
                    bulk_g0=values["bulk_g0"],
                    DeltaE_c=values.get("DeltaE_c", 0.0),
                )
            else:
                table[name] = MaterialParams(name=name, **values)
        except KeyError as exc:
            raise ConfigError(f"{path}: new material is missing {exc.args[0]}") from None
        except TypeError as exc:
            raise ConfigError(f"{path}: incomplete material definition ({exc})") from None
        except ParameterError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return table


def _pulses(data: Any) -> list[TwoLevelPulse | VeeSpec]:
    if data is None:
        return []
    if not isinstance(data, list):
        raise ConfigError("pulses: expected a list")
    pulses: list[TwoLevelPulse | VeeSpec] = []
    for i, entry in enumerate(data):
        path = f"pulses[{i}]"
        if not isinstance(entry, Mapping) or entry.get("kind") not in PULSE_KEYS:
            raise ConfigError(f"{path}.kind: expected one of {sorted(PULSE_KEYS)}")
        values = _check_type(entry, PULSE_KEYS[entry["kind"]], path)
        try:
            if values["kind"] == "two_level":
                pulses.append(
                    TwoLevelPulse(
                        rabi_energy=values["rabi_mev"],
                        detuning_energy=values.get("detuning_mev", 0.0),
                        duration=values.get("duration_ps"),
                    )
                )
            else:
                pulses.append(
                    VeeSpec(
                        rabi_12=values["rabi12_mev"],
                        rabi_13=values.get("rabi13_mev"),
                        detuning_13=values["det13_mev"],
                        detuning_12=values.get("det12_mev", 0.0),
                        duration=values["duration_ps"],
                        dt=values.get("dt_ps"),
                    )
                )
        except KeyError as exc:
            raise ConfigError(f"{path}: missing key {exc.args[0]}") from None
        except ParameterError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return pulses


# =============================================================================
# Run Configuration
# =============================================================================


@dataclass
class RunConfig:
    """Validated run configuration.

    Attributes:
        materials: Material table (defaults plus overrides).
        stack: Stack geometry, fields and on-site energy.
        pulses: Configured two-level pulses and Vee runs.
        sequence: Gate tokens for ``gate``; empty means the controlled-NOT.
        design: Designer inputs.
        output: Output destinations; None writes to stdout.
        logging: Logging level, format and optional file.
    """

    materials: dict[str, MaterialParams] = field(default_factory=lambda: dict(DEFAULT_MATERIALS))
    stack: StackConfig = field(default_factory=StackConfig)
    pulses: list[TwoLevelPulse | VeeSpec] = field(default_factory=list)
    sequence: list[str] = field(default_factory=list)
    design: DesignConfig = field(default_factory=DesignConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    SECTIONS = ("materials", "stack", "pulses", "sequence", "design", "output", "logging")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any] | None) -> RunConfig:
        """
        Validate a parsed document.

        Raises:
            ConfigError: On unknown keys, wrong types or inconsistent values.
        """
        data = data or {}
        if not isinstance(data, Mapping):
            raise ConfigError("configuration root must be a mapping")
        _reject_unknown(data, set(cls.SECTIONS), "")
        sequence = _check_type(data.get("sequence", []), [str], "sequence")
        config = cls(
            materials=_materials(data.get("materials")),
            stack=_section(StackConfig, data.get("stack"), "stack"),
            pulses=_pulses(data.get("pulses")),
            sequence=sequence,
            design=_section(DesignConfig, data.get("design"), "design"),
            output=_section(OutputConfig, data.get("output"), "output"),
            logging=_section(LoggingConfig, data.get("logging"), "logging"),
        )
        config._check_consistency()
        return config

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        """Read a ``.json``, ``.yaml`` or ``.yml`` document."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            if path.suffix.lower() in {".yaml", ".yml"}:
                data = yaml.safe_load(text)
            elif path.suffix.lower() == ".json":
                data = json.loads(text)
            else:
                raise ConfigError(f"unsupported config format '{path.suffix}' (use .json or .yaml)")
        except (json.JSONDecodeError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from None
        return cls.from_mapping(data)

    def _check_consistency(self) -> None:
        for key in ("well", "barrier"):
            name = getattr(self.stack, key)
            if name not in self.materials:
                raise ConfigError(f"stack.{key}: unknown material '{name}'")
        if len(self.design.bounds_nm) != 2:
            raise ConfigError("design.bounds_nm: expected [d_min, d_max]")
        if not isinstance(logging.getLevelName(self.logging.level.upper()), int):
            raise ConfigError(f"logging.level: unknown level '{self.logging.level}'")
        try:
            self.qubit_roles()
            self.gate_sequence()
            self.stack_design()
            self.design_problem()
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None

    # -------------------------------------------------------------------------
    # Builders
    # -------------------------------------------------------------------------

    def material(self, name: str) -> MaterialParams:
        try:
            return self.materials[name]
        except KeyError:
            known = sorted(self.materials)
            raise ConfigError(f"unknown material '{name}'. Known: {known}") from None

    def stack_design(
        self,
        half_widths: list[float] | None = None,
        B: float | None = None,
        B1: float | None = None,
        T_sw: float | None = None,
        lateral_nm: float | None = None,
        well: str | None = None,
        barrier: str | None = None,
    ) -> StackDesign:
        """StackDesign from the ``stack`` section; arguments override it."""
        stack = self.stack
        return StackDesign.from_half_widths(
            half_widths if half_widths is not None else stack.half_widths_nm,
            stack.lateral_nm if lateral_nm is None else lateral_nm,
            self.material(well or stack.well),
            self.material(barrier or stack.barrier),
            B=stack.b_tesla if B is None else B,
            B1=stack.b1_tesla if B1 is None else B1,
            T_sw=stack.tsw_ps if T_sw is None else T_sw,
        )

    def qubit_roles(self) -> QubitRoles:
        return QubitRoles(**self.stack.roles)

    def gate_sequence(self) -> list[GateOp] | None:
        """Parsed ``sequence`` tokens, or None for the default controlled-NOT."""
        if not self.sequence:
            return None
        return parse_sequence(self.sequence, self.qubit_roles())

    def design_problem(self, **overrides: Any) -> DesignProblem:
        """DesignProblem from the ``design`` and ``stack`` sections."""
        design = self.design
        values: dict[str, Any] = {
            "n_dots": design.n_dots,
            "B": self.stack.b_tesla,
            "B1": self.stack.b1_tesla,
            "T_sw": self.stack.tsw_ps,
            "well": self.material(self.stack.well),
            "barrier": self.material(self.stack.barrier),
            "d_lt": self.stack.lateral_nm,
            "bounds": tuple(design.bounds_nm),
            "seed": design.seed,
            "n_starts": design.n_starts,
            "max_iterations": design.max_iterations,
            "grid_step": design.grid_step_nm,
            "strict": design.strict,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return DesignProblem(**values)

    def pulses_of(self, kind: type) -> list[Any]:
        return [pulse for pulse in self.pulses if isinstance(pulse, kind)]


def configure_logging(
    level: str = DEFAULT_LOG_LEVEL,
    fmt: str = DEFAULT_LOG_FORMAT,
    file: str | Path | None = None,
) -> logging.Logger:
    """
    Route the ``qdstack`` logger to stderr (and optionally a file).

    Existing handlers on the package logger are replaced, so repeated calls
    do not duplicate output.
    """
    logger = logging.getLogger("qdstack")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    formatter = logging.Formatter(fmt)
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(formatter)
    logger.addHandler(console)
    if file:
        Path(file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    logger.setLevel(level.upper())
    return logger
