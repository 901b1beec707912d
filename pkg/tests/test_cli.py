"""Scenario runner, configuration files, CSV schemas, CLI exit codes."""

import os
import subprocess
import sys

import numpy as np
import pytest

from ferrohyst import PointTrajectory, clausius_duhem_residuals
from ferrohyst.cli import main
from ferrohyst.errors import InvalidParameterError
from ferrohyst.scenarios import build_density, built_in_names, load_config, run_scenario
from ferrohyst.verify import run_suite

CSV_HEADER = "t,eps,E,q,P,U,sigma,D,F,diss"


def test_built_in_names():
    assert built_in_names() == ["beam-demo", "bipolar-linear", "bipolar-quartic",
                                "stress-linear", "stress-quartic"]


def test_unknown_scenario_rejected(tmp_path):
    with pytest.raises(InvalidParameterError):
        load_config("no-such-scenario", out_dir=str(tmp_path))


def test_point_csv_schema(scenario_runs):
    path = scenario_runs["bipolar-linear"]["files"]["point"]
    with open(path) as fh:
        header = fh.readline().strip()
        first = fh.readline()
    assert header == CSV_HEADER
    assert "\r" not in first and "," in first


def test_csv_round_trip(scenario_runs):
    path = scenario_runs["bipolar-linear"]["files"]["point"]
    traj = PointTrajectory.read_csv(path)
    orig = scenario_runs["bipolar-linear"]["trajectory"]
    assert np.array_equal(traj.P, orig.P)
    assert np.array_equal(traj.t, orig.t)


def test_run_determinism(tmp_path):
    # identical config and seed produce byte-identical CSV
    cfg_a = load_config("bipolar-linear", out_dir=str(tmp_path / "a"))
    cfg_b = load_config("bipolar-linear", out_dir=str(tmp_path / "b"))
    # shrink the run to keep this fast
    for cfg in (cfg_a, cfg_b):
        cfg.sections["drive"]["samples_per_period"] = "200"
        cfg.sections["drive"]["periods"] = "2"
    pa = run_scenario(cfg_a)["files"]["point"]
    pb = run_scenario(cfg_b)["files"]["point"]
    with open(pa, "rb") as fa, open(pb, "rb") as fb:
        assert fa.read() == fb.read()


def test_every_scenario_passes_second_law(scenario_runs):
    for name, result in scenario_runs.items():
        traj = result["trajectory"]
        res = clausius_duhem_residuals(traj)
        scale = 1.0 + np.max(np.abs(traj.sigma)) + np.max(np.abs(traj.E))
        assert res.min() >= -1e-8 * scale, name


def test_config_file_overrides(tmp_path):
    config_path = tmp_path / "run.cfg"
    config_path.write_text(
        "[scenario]\nname = custom\ndrive = field\n"
        "[params]\nshape = quartic\nkappa = 0.02\n"
        "[density]\ntype = prandtl\ntable = 0.5:1.0, 1.0:0.5\n"
        "[drive]\nwaveform = sine\namplitude = 0.8\nperiods = 1\n"
        "samples_per_period = 100\n"
        "[output]\ndir = " + str(tmp_path) + "\n")
    config = load_config(path=str(config_path))
    assert config.name == "custom"
    assert config.get_float("params", "kappa") == 0.02
    density = build_density(config)
    assert np.allclose(density.nodes, [0.5, 1.0])
    result = run_scenario(config)
    traj = result["trajectory"]
    assert traj.t.size == 101
    assert np.max(np.abs(traj.E)) <= 0.8 + 1e-12


def test_missing_config_file_rejected(tmp_path):
    with pytest.raises(InvalidParameterError):
        load_config(path=str(tmp_path / "missing.cfg"))


def test_env_var_overrides_out_dir(tmp_path, monkeypatch):
    env_dir = tmp_path / "env_out"
    monkeypatch.setenv("FERROHYST_OUT", str(env_dir))
    config = load_config("bipolar-linear", out_dir=str(tmp_path / "flag_out"))
    assert config.get("output", "dir") == str(env_dir)


def test_cli_run_and_exit_codes(tmp_path, monkeypatch):
    monkeypatch.delenv("FERROHYST_OUT", raising=False)
    cfg = tmp_path / "small.cfg"
    cfg.write_text("[drive]\nsamples_per_period = 100\nperiods = 1\n")
    assert main(["run", "bipolar-linear", "--config", str(cfg),
                 "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "point_trajectory.csv").exists()
    assert main(["run", "not-a-scenario", "--out-dir", str(tmp_path)]) == 2


def test_cli_verify_report(tmp_path, monkeypatch):
    monkeypatch.delenv("FERROHYST_OUT", raising=False)
    assert main(["verify", "brokate", "--cases", "20",
                 "--out-dir", str(tmp_path)]) == 0
    report = tmp_path / "verify_brokate.csv"
    assert report.exists()
    header = report.read_text().splitlines()[0]
    assert header == "case,composition_error,ordering_margin"


def test_cli_lipschitz_report_columns(tmp_path, monkeypatch):
    monkeypatch.delenv("FERROHYST_OUT", raising=False)
    assert main(["verify", "lipschitz", "--pairs", "5", "--bbar", "1.0",
                 "--out-dir", str(tmp_path)]) == 0
    header = (tmp_path / "verify_lipschitz.csv").read_text().splitlines()[0]
    assert header == "pair_id,ratio,bound"


def test_cli_convergence_levels_validation(tmp_path, monkeypatch):
    monkeypatch.delenv("FERROHYST_OUT", raising=False)
    assert main(["convergence", "point", "--levels", "2",
                 "--out-dir", str(tmp_path)]) == 2


def test_unknown_suite_rejected():
    with pytest.raises(InvalidParameterError):
        run_suite("no-such-suite")


def test_cli_entry_point_subprocess(tmp_path):
    env = dict(os.environ, FERROHYST_OUT=str(tmp_path))
    proc = subprocess.run(
        [sys.executable, "-m", "ferrohyst.cli", "verify", "madelung", "--cases", "5"],
        capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert "PASS madelung" in proc.stdout
    assert (tmp_path / "verify_madelung.csv").exists()
