"""Tests for qdstack.orchestration: run configuration and the command line."""

from __future__ import annotations

import io
import json
import logging
import re
import shlex
import shutil
from pathlib import Path

import pandas as pd
import pytest

from qdstack.dynamics import TwoLevelPulse, VeeSpec
from qdstack.exceptions import ConfigError
from qdstack.orchestration import RunConfig, configure_logging, run

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(autouse=True)
def detach_log_handlers():
    # run() binds handlers to the captured stderr of the current test
    yield
    logger = logging.getLogger("qdstack")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(logging.NOTSET)


def run_csv(capsys, *argv: str) -> pd.DataFrame:
    assert run(list(argv)) == 0
    text = capsys.readouterr().out
    return pd.read_csv(io.StringIO(text), dtype={"k-l": str, "input": str, "state": str})


def write_config(tmp_path: Path, payload: dict, name: str = "run.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestRunConfig:
    """Validation of run configuration documents."""

    @pytest.mark.parametrize("name", ["config.example.yaml", "config.example.json"])
    def test_shipped_examples_load(self, name):
        config = RunConfig.load(ROOT / "config" / name)
        assert config.stack_design().n_dots == 3
        assert config.pulses_of(VeeSpec)[0].detuning_13 == 0.72

    def test_yaml_example_defines_new_material(self):
        config = RunConfig.load(ROOT / "config" / "config.example.yaml")
        assert config.material("InP").E_g == 1424.0
        assert config.pulses_of(TwoLevelPulse)[0].rabi_energy == 0.2068

    def test_defaults(self):
        config = RunConfig.from_mapping(None)
        assert config.stack.half_widths_nm == [4.0, 8.0, 5.0]
        assert config.gate_sequence() is None
        assert config.design_problem().n_dots == 3
        assert config.logging.level == "WARNING"

    def test_yaml_and_json_agree(self, tmp_path):
        payload = {"stack": {"half_widths_nm": [3.0, 6.0], "b_tesla": 8}, "design": {"seed": 4}}
        from_json = RunConfig.load(write_config(tmp_path, payload))
        yaml_path = tmp_path / "run.yaml"
        yaml_path.write_text(
            "stack:\n  half_widths_nm: [3.0, 6.0]\n  b_tesla: 8\ndesign:\n  seed: 4\n",
            encoding="utf-8",
        )
        from_yaml = RunConfig.load(yaml_path)
        assert from_json.stack == from_yaml.stack
        assert from_json.design == from_yaml.design
        assert from_json.stack.b_tesla == 8.0

    @pytest.mark.parametrize(
        "payload, path",
        [
            ({"frobnicate": 1}, "frobnicate"),
            ({"stack": {"half_width": [4.0]}}, "stack.half_width"),
            ({"stack": {"roles": {"spectator": 3}}}, "stack.roles.spectator"),
            ({"stack": {"b_tesla": "ten"}}, "stack.b_tesla"),
            ({"stack": {"b_tesla": True}}, "stack.b_tesla"),
            ({"design": {"n_starts": 2.5}}, "design.n_starts"),
            ({"stack": {"half_widths_nm": [4.0, "x"]}}, "stack.half_widths_nm[1]"),
            ({"materials": {"GaAs": {"mass": 0.1}}}, "materials.GaAs.mass"),
            ({"pulses": [{"kind": "square"}]}, "pulses[0].kind"),
            ({"pulses": [{"kind": "vee", "rabi12_mev": 0.2}]}, "pulses[0]"),
        ],
    )
    def test_errors_name_the_key(self, payload, path):
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_mapping(payload)
        assert path in str(excinfo.value)

    @pytest.mark.parametrize(
        "payload",
        [
            {"stack": {"well": "InSb"}},
            {"stack": {"roles": {"control": 0, "swap": 2, "target": 1}}},
            {"sequence": ["C7"]},
            {"design": {"bounds_nm": [1.0]}},
            {"design": {"bounds_nm": [8.0, 2.0]}},
            {"logging": {"level": "LOUD"}},
            {"materials": {"InSb": {"E_g": 235.0}}},
            {"stack": {"half_widths_nm": [4.0, -1.0]}},
        ],
    )
    def test_inconsistent_values(self, payload):
        with pytest.raises(ConfigError):
            RunConfig.from_mapping(payload)

    def test_material_override(self):
        config = RunConfig.from_mapping({"materials": {"InAs": {"m_band_edge": 0.026}}})
        assert config.material("InAs").m_band_edge == 0.026
        assert config.stack_design().dots[0].well_material.m_band_edge == 0.026

    def test_unsupported_format(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ConfigError, match="unsupported"):
            RunConfig.load(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            RunConfig.load(tmp_path / "absent.yaml")

    def test_logging_handlers_not_duplicated(self, tmp_path):
        log_file = tmp_path / "logs" / "qdstack.log"
        configure_logging("INFO", file=log_file)
        logger = configure_logging("INFO", file=log_file)
        assert len(logger.handlers) == 2
        logging.getLogger("qdstack.test").info("[TEST] routed")
        for handler in logger.handlers:
            handler.flush()
        assert "[TEST] routed" in log_file.read_text(encoding="utf-8")


class TestCommands:
    """Subcommands write CSV to stdout and exit with 0."""

    def test_validate_fixture(self, capsys):
        frame = run_csv(capsys, "validate", "--fixture", "table1", "--tsw-ps", "10")
        assert list(frame.columns) == ["k-l", "dE00_meV", "dE11_meV", "pass17"]
        assert len(frame) == 8
        assert frame["pass17"].all()
        assert frame.loc[0, "dE00_meV"] == 13.2029

    def test_validate_is_deterministic(self, capsys):
        assert run(["validate", "--fixture", "table1"]) == 0
        first = capsys.readouterr().out
        assert run(["validate", "--fixture", "table1"]) == 0
        assert capsys.readouterr().out == first

    def test_validate_external_table(self, capsys, tmp_path, table1):
        path = tmp_path / "transitions.csv"
        table1.to_csv(path, index=False)
        frame = run_csv(capsys, "validate", "--table", str(path), "--non-strict")
        assert frame["pass17"].all()

    def test_g_factor(self, capsys):
        frame = run_csv(capsys, "g-factor", "--material", "InAs", "--energy-mev", "0", "100")
        assert frame.loc[0, "g"] == pytest.approx(-14.9)
        assert frame.loc[1, "g"] > frame.loc[0, "g"]

    def test_sphere_g(self, capsys):
        frame = run_csv(capsys, "sphere-g", "--radius-nm", "5", "15")
        assert frame.loc[0, "g"] > 0 > frame.loc[1, "g"]

    def test_well_solve(self, capsys):
        frame = run_csv(
            capsys, "well-solve", "--half-widths-nm", "4", "--energy-reference", "barrier_edge"
        )
        assert frame.loc[0, "w_A"] + frame.loc[0, "w_B"] == pytest.approx(1.0)

    def test_levels_and_transitions(self, capsys):
        levels = run_csv(capsys, "levels", "--half-widths-nm", "4", "8", "5")
        assert list(levels["half_width_nm"]) == [4.0, 8.0, 5.0]
        transitions = run_csv(capsys, "transitions")
        assert list(transitions.columns) == ["k-l", "dE00_meV", "dE11_meV"]
        assert list(transitions["k-l"]) == ["0-1", "1-2"]

    def test_check(self, capsys):
        frame = run_csv(capsys, "check", "--tsw-ps", "10")
        assert list(frame["requirement"]) == ["rotation", "optical"]
        assert bool(frame.loc[0, "pass"])

    def test_pulse_cancellation(self, capsys):
        frame = run_csv(capsys, "pulse", "--rabi-mev", "0.2068", "--detuning-mev", "0.3582")
        assert len(frame) == 201
        assert frame["p_excited"].max() == pytest.approx(0.25, abs=1e-3)
        assert frame["p_excited"].iloc[-1] < 1e-6

    def test_pulse_numerical(self, capsys):
        frame = run_csv(capsys, "pulse", "--rabi-mev", "0.2068", "--numerical")
        assert frame["p_excited"].iloc[-1] == pytest.approx(1.0, abs=1e-6)

    def test_vee(self, capsys):
        frame = run_csv(
            capsys, "vee", "--rabi12-mev", "0.2078", "--det13-mev", "0.72", "--duration-ps", "12"
        )
        assert list(frame.columns) == ["t_ps", "p1", "p2", "p3"]
        assert frame["p3"].iloc[-1] < 0.05

    def test_vee_from_config(self, capsys):
        frame = run_csv(capsys, "vee", "--config", str(ROOT / "config" / "config.example.json"))
        assert frame["t_ps"].iloc[-1] == pytest.approx(12.0)

    def test_gate_ideal(self, capsys):
        frame = run_csv(capsys, "gate", "--mode", "ideal", "--input", "10")
        final = frame.set_index("state")["population"]
        assert final["0d-2d"] == pytest.approx(1.0)
        assert final.sum() == pytest.approx(1.0)

    def test_gate_custom_sequence(self, capsys):
        frame = run_csv(capsys, "gate", "--input", "00", "--sequence", "C3")
        final = frame.set_index("state")["population"]
        assert final["0u-1u"] == pytest.approx(1.0)

    def test_gate_pulsed_with_trace(self, capsys, tmp_path):
        trace_path = tmp_path / "trace.csv"
        frame = run_csv(
            capsys, "gate", "--mode", "pulsed", "--input", "00", "--trace-out", str(trace_path)
        )
        assert list(frame.columns) == ["input", "fidelity", "corrected_fidelity", "leakage"]
        assert frame["input"].tolist() == ["00"]
        trace = pd.read_csv(trace_path, dtype={"input": str})
        assert trace.columns[:2].tolist() == ["input", "t_ps"]
        assert set(trace["input"]) == {"00"}

    def test_design_json(self, capsys, tmp_path):
        json_path = tmp_path / "design.json"
        frame = run_csv(capsys, "design", "--n-dots", "3", "--json-out", str(json_path))
        assert len(frame) == 2
        payload = json.loads(json_path.read_text(encoding="utf-8"))
        assert payload["feasible"] is True
        assert len(payload["geometry"]["half_widths_nm"]) == 3

    def test_output_file(self, capsys, tmp_path):
        out = tmp_path / "nested" / "levels.csv"
        assert run(["levels", "--output", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert out.read_text(encoding="utf-8").startswith("dot,half_width_nm,")


class TestExitCodes:
    def test_unknown_command(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_no_command(self, capsys):
        assert run([]) == 2

    def test_help_and_version(self, capsys):
        assert run(["--help"]) == 0
        assert "validate" in capsys.readouterr().out
        assert run(["--version"]) == 0

    def test_unknown_config_key(self, capsys, tmp_path):
        path = write_config(tmp_path, {"stack": {"frobnicate": 1}})
        assert run(["levels", "--config", str(path)]) == 2
        assert "[ERROR]" in capsys.readouterr().err

    def test_unknown_material_flag(self, capsys):
        assert run(["g-factor", "--material", "Unobtainium"]) == 2

    def test_missing_pulse_parameters(self, capsys):
        assert run(["pulse"]) == 2
        assert run(["vee", "--rabi12-mev", "0.2"]) == 2

    def test_unreadable_table(self, capsys, tmp_path):
        assert run(["validate", "--table", str(tmp_path / "absent.csv")]) == 2

    def test_non_numeric_table(self, capsys, tmp_path):
        table = tmp_path / "bad.csv"
        table.write_text("k-l,dE00_meV,dE11_meV\n1-2,abc,0.5\n", encoding="utf-8")
        assert run(["validate", "--table", str(table)]) == 1
        assert "dE00_meV" in capsys.readouterr().err

    def test_domain_error(self, capsys):
        assert run(["levels", "--half-widths-nm", "-1"]) == 1
        assert "half_width_d" in capsys.readouterr().err

    def test_unknown_gate_token(self, capsys):
        assert run(["gate", "--sequence", "C9"]) == 1


def readme_commands() -> list[str]:
    text = (ROOT / "README.md").read_text(encoding="utf-8")
    blocks = re.findall(r"```bash\n(.*?)```", text, flags=re.DOTALL)
    return [
        line.strip()
        for block in blocks
        for line in block.splitlines()
        if line.strip().startswith("qdstack ")
    ]


class TestReadme:
    def test_readme_has_examples(self):
        assert len(readme_commands()) >= 5

    @pytest.mark.parametrize("line", readme_commands())
    def test_readme_example_runs(self, line, capsys, tmp_path, monkeypatch):
        shutil.copytree(ROOT / "config", tmp_path / "config")
        monkeypatch.chdir(tmp_path)
        assert run(shlex.split(line)[1:]) == 0
