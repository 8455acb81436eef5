import json

import numpy as np
import pytest

from cli.commands import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, OUTPUT_ENV, run
from cli.config import (
    DEFAULTS,
    build_config,
    config_to_values,
    load_config_file,
    parse_config_text,
    parse_int_list,
    resolve_values,
    validate,
)
from errors import ConfigError, NumericalError
from experiments import truncation

SMALL = ["--n", "4", "--trials", "2", "--seed", "5", "--workers", "1"]


# -----------------------
# CONFIG LAYER
# -----------------------
def test_parse_config_text_with_comments():
    values = parse_config_text("# run\nparams.n = 8\n\ntrials=20  # fewer\n")
    assert values == {"params.n": "8", "trials": "20"}


@pytest.mark.parametrize("text", ["params.n 8", "params.k = 3"])
def test_parse_config_text_rejects_bad_lines(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_int_lists():
    assert parse_int_list("2..5") == (2, 3, 4, 5)
    assert parse_int_list("8,10,12") == (8, 10, 12)


def test_build_config_layers_and_defaults():
    config = build_config(resolve_values({"params.n": "7", "params.seed": "9"}, {"trials": "3"}))
    assert config.params.n == 7
    assert config.params.master_seed == 9
    assert config.trials == 3
    assert config.w == 0.2
    assert config.m is None


def test_build_config_reports_bad_values():
    with pytest.raises(ConfigError):
        build_config(resolve_values({"trials": "many"}))
    with pytest.raises(ConfigError):
        build_config(resolve_values({"params.seed": "-3"}))
    with pytest.raises(ConfigError):
        build_config(resolve_values({"params.n": "4", "m": "6"}))


def test_missing_seed_is_drawn_and_kept():
    config = build_config(dict(DEFAULTS))
    values = config_to_values(config)
    assert values["params.seed"] == str(config.params.master_seed)
    assert build_config(resolve_values(values)) == config


def test_validate_reports_errors_and_exponent_warning():
    config = build_config(resolve_values({"params.seed": "1", "params.n": "20"}))
    severities = [severity for severity, _ in validate(config)]
    assert "error" in severities
    defaults = build_config(resolve_values({"params.seed": "1"}))
    assert validate(defaults) == [("warning", validate(defaults)[0][1])]
    assert "2mu" in validate(defaults)[0][1]
    shallow = build_config(resolve_values({"params.seed": "1", "w": "0.01", "epsilon": "0.01", "ell_loc": "0.01"}))
    assert validate(shallow) == []


def test_manifest_needs_a_config_object(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"subcommand": "dos"}))
    with pytest.raises(ConfigError):
        load_config_file(path)


# -----------------------
# COMMANDS
# -----------------------
def test_truncation_flow_top_level(tmp_path):
    out = tmp_path / "run"
    assert run(["truncation-flow", *SMALL, "--m-range", "4", "--out", str(out)]) == EXIT_OK
    lines = (out / "truncation-flow.csv").read_text().splitlines()
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert row["statistic"] == "truncation_error"
    assert float(row["value"]) == 0.0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "truncation-flow"
    assert manifest["seed"] == 5


def test_manifest_replay_is_byte_identical(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(["poisson-test", *SMALL, "--set", "window_eigenvalues=6", "--out", str(first)]) == EXIT_OK
    assert run(["poisson-test", "--config", str(first / "manifest.json"), "--out", str(second)]) == EXIT_OK
    assert (first / "poisson-test.csv").read_bytes() == (second / "poisson-test.csv").read_bytes()


def test_flags_override_config_file(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("params.n = 6\ntrials = 2\nparams.seed = 1\nworkers = 1\n")
    out = tmp_path / "out"
    assert run(["sample", "--config", str(config), "--n", "3", "--out", str(out)]) == EXIT_OK
    assert np.load(out / "sample.npy").shape == (8, 8)


def test_spectrum_writes_eigenvalues(tmp_path):
    assert run(["spectrum", *SMALL, "--out", str(tmp_path)]) == EXIT_OK
    eigenvalues = np.load(tmp_path / "spectrum.npy")
    assert eigenvalues.shape == (16,)
    assert np.all(np.diff(eigenvalues) >= 0)


def test_single_cell_sweep_writes_one_row(tmp_path):
    argv = ["sweep", *SMALL, "--c-values", "1.0", "--n-values", "4", "--sites-per-trial", "1",
            "--window-eigenvalues", "6", "--out", str(tmp_path)]
    assert run(argv) == EXIT_OK
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 2


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert run(["dos", *SMALL, "--dos-bins", "8"]) == EXIT_OK
    assert (tmp_path / "env" / "dos.csv").exists()


@pytest.mark.parametrize("argv", [
    ["dos", "--bogus", "1"],
    ["dos", "--config", "/nonexistent/run.cfg"],
    ["dos", "--set", "params.k=3"],
    ["dos", "--n", "20"],
    ["localization", *SMALL, "--w", "1.5"],
    ["counting", *SMALL, "--epsilon", "0.01"],
    ["teleport"],
])
def test_configuration_errors_exit_one(argv, tmp_path):
    assert run([*argv, "--out", str(tmp_path)] if argv[0] != "teleport" else argv) == EXIT_CONFIG


def test_partial_solver_failure_exits_two(tmp_path, monkeypatch):
    original = truncation._truncation_traces

    def flaky(config, trial, levels):
        if trial == 0:
            raise NumericalError("forced")
        return original(config, trial, levels)

    monkeypatch.setattr(truncation, "_truncation_traces", flaky)
    assert run(["truncation-flow", *SMALL, "--m-range", "2..4", "--out", str(tmp_path)]) == EXIT_NUMERICAL
    assert "solver_failures=1" in (tmp_path / "truncation-flow.csv").read_text()


def test_total_solver_failure_exits_two(tmp_path, monkeypatch):
    def broken(config, trial, levels):
        raise NumericalError("forced")

    monkeypatch.setattr(truncation, "_truncation_traces", broken)
    assert run(["truncation-flow", *SMALL, "--out", str(tmp_path)]) == EXIT_NUMERICAL
    assert not (tmp_path / "truncation-flow.csv").exists()


def test_manifest_replay_with_more_workers_is_byte_identical(tmp_path):
    first, second = tmp_path / "serial", tmp_path / "pooled"
    argv = ["truncation-flow", "--n", "5", "--trials", "8", "--seed", "12", "--m-range", "2..5"]
    assert run([*argv, "--workers", "1", "--out", str(first)]) == EXIT_OK
    replay = ["truncation-flow", "--config", str(first / "manifest.json"), "--workers", "8", "--out", str(second)]
    assert run(replay) == EXIT_OK
    assert (first / "truncation-flow.csv").read_bytes() == (second / "truncation-flow.csv").read_bytes()
    assert json.loads((second / "manifest.json").read_text())["config"]["workers"] == "8"
