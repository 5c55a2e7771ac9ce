import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from fivefactor import cli
from fivefactor.config import ParseError, ValidationError, config_from_dict, load_config

CAPPAR_MODEL = dict(
    kappa=0.09, r_bar=0.0275, sigma_r=0.01, alpha=0.06, x_bar=0.045, sigma_x=0.007,
    beta=0.05, pi_bar=0.015, sigma_pi=0.005, sigma_S=0.15, sigma_I=0.005,
    rho_rS=0.0, rho_rPi=0.8, rho_SPi=-0.25,
)


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_shipped_configs_load(configs_dir):
    paths = sorted(configs_dir.glob("*.toml"))
    assert len(paths) >= 6
    for path in paths:
        cfg = load_config(path)
        assert cfg.n_paths >= 1


def test_cappar_values(configs_dir):
    cfg = load_config(configs_dir / "cappar.toml")
    assert cfg.model.kappa == 0.09 and cfg.model.corr.rho_rPi == 0.8
    assert cfg.pricing.h == -0.001
    assert cfg.portfolio.f == (40.0, 40.0, 20.0)
    assert len(cfg.times) == 15 and cfg.times[-1] == 15.0


def test_invalid_triple_message():
    doc = {"model": dict(CAPPAR_MODEL, rho_rS=0.9, rho_rPi=0.9, rho_SPi=0.0)}
    with pytest.raises(ValidationError, match=r"determinant -0\.62.*rho_SPi must lie in \[0\.62, 1\]"):
        config_from_dict(doc)


@pytest.mark.parametrize(
    "patch, key",
    [
        ({"model": dict(CAPPAR_MODEL, sigma_r=-1.0)}, "sigma_r"),
        ({"model": {k: v for k, v in CAPPAR_MODEL.items() if k != "kappa"}}, "kappa"),
        ({"model": dict(CAPPAR_MODEL, kappa="fast")}, "kappa"),
        ({"model": dict(CAPPAR_MODEL, gamma=1.0)}, "gamma"),
        ({"simulation": {"n_paths": 0}}, "n_paths"),
        ({"simulation": {"times": [1.0, 0.5]}}, "times"),
        ({"output": {"format": "xml"}}, "format"),
        ({"initial": {"r": 0.0, "S": 0.0, "x": 0.0, "I": 1.0, "pi": 0.0}}, "S"),
        ({"portfolio": {"tau_B": 10.0, "tau_D": 15.0}}, "'w'"),
    ],
)
def test_validation_errors_name_the_key(patch, key):
    doc = {"model": CAPPAR_MODEL} | patch
    with pytest.raises(ValidationError, match=key):
        config_from_dict(doc)


def test_parse_errors(tmp_path):
    empty = tmp_path / "empty.toml"
    empty.write_text("")
    with pytest.raises(ParseError):
        load_config(empty)
    broken = tmp_path / "broken.toml"
    broken.write_text("[model\nkappa = ")
    with pytest.raises(ParseError):
        load_config(broken)
    with pytest.raises(ParseError):
        load_config(tmp_path / "missing.toml")


def test_config_round_trip(configs_dir, tmp_path):
    for path in sorted(configs_dir.glob("*.toml")):
        cfg = load_config(path)
        echo = tmp_path / "echo.json"
        echo.write_text(json.dumps(cfg.to_dict()))
        assert load_config(echo) == cfg


def run_cli(*args):
    return cli.main([str(a) for a in args])


def test_simulate_is_byte_identical(configs_dir, tmp_path):
    cfg = configs_dir / "cappar.toml"
    before = digest(cfg)
    assert run_cli("simulate", "--config", cfg, "--seed", 42, "--out", tmp_path / "a") == 0
    assert run_cli("simulate", "--config", cfg, "--seed", 42, "--out", tmp_path / "b") == 0
    a, b = tmp_path / "a" / "scenarios.csv", tmp_path / "b" / "scenarios.csv"
    assert a.read_bytes() == b.read_bytes()
    assert digest(cfg) == before
    rows = cli.read_scenarios_csv(a)
    assert len(rows) == 1000 and len(rows[0]) == 15
    assert run_cli("simulate", "--config", cfg, "--seed", 43, "--out", tmp_path / "c") == 0
    assert (tmp_path / "c" / "scenarios.csv").read_bytes() != a.read_bytes()


def test_csv_floats_round_trip(configs_dir, tmp_path):
    assert run_cli("simulate", "--config", configs_dir / "cappar.toml", "--out", tmp_path) == 0
    from fivefactor import sim

    cfg = load_config(configs_dir / "cappar.toml")
    ref = sim.simulate(cfg.model, cfg.initial, cfg.grid, cfg.n_paths, cfg.seed)
    rows = cli.read_scenarios_csv(tmp_path / "scenarios.csv")
    got = np.array([[row[1:] for row in rows[i]] for i in range(cfg.n_paths)])
    np.testing.assert_array_equal(got, ref.paths)


def test_weights_command(configs_dir, tmp_path):
    assert run_cli("weights", "--config", configs_dir / "cappar.toml", "--out", tmp_path) == 0
    doc = json.loads((tmp_path / "weights.json").read_text())
    np.testing.assert_allclose(doc["normalized"], [46, -11, 65], atol=0.5)


def test_bei_command_short_end(configs_dir, tmp_path):
    assert run_cli("bei", "--config", configs_dir / "bei_case1.toml", "--out", tmp_path) == 0
    lines = (tmp_path / "bei.csv").read_text().splitlines()
    assert lines[0] == "maturity,bei"
    assert lines[1] == "0.0,0.0"


def test_tabular_json_format(configs_dir, tmp_path):
    assert run_cli("curves", "--config", configs_dir / "cappar.toml", "--out", tmp_path, "--format", "json") == 0
    recs = json.loads((tmp_path / "curves.json").read_text())
    assert set(recs[0]) == {"maturity", "yield", "forward", "bei"}
    assert recs[0]["yield"] == 0.005


@pytest.mark.parametrize("command", ["moments", "sharpe", "validate"])
def test_other_commands(command, configs_dir, tmp_path):
    assert run_cli(command, "--config", configs_dir / "cappar.toml", "--out", tmp_path) == 0
    assert (tmp_path / "config.json").exists()


def test_result_json_round_trip(configs_dir, tmp_path):
    cfg = load_config(configs_dir / "cappar.toml")
    doc = cli.moments_document(cfg)
    assert run_cli("moments", "--config", configs_dir / "cappar.toml", "--out", tmp_path) == 0
    assert json.loads((tmp_path / "moments.json").read_text()) == doc


def test_exit_codes_and_error_record(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[model]\nkappa = 0.1\n")
    assert run_cli("moments", "--config", bad, "--out", tmp_path) == 2
    rec = json.loads(capsys.readouterr().err.strip())
    assert rec["exit_code"] == 2 and "r_bar" in rec["message"]

    singular = tmp_path / "singular.toml"
    body = "\n".join(f"{k} = {v}" for k, v in dict(CAPPAR_MODEL, rho_rS=0.0, rho_rPi=0.8, rho_SPi=0.6).items())
    singular.write_text(f"[model]\n{body}\n[initial]\nr=0.0\nS=1.0\nx=0.0\nI=1.0\npi=0.0\n[simulation]\nstep=1.0\nn_steps=2\n")
    assert run_cli("simulate", "--config", singular, "--out", tmp_path) == 2
    assert json.loads(capsys.readouterr().err.strip())["error"] == "RankDeficientCorrelation"


def test_module_entry_point(configs_dir, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fivefactor", "validate", "--config", str(configs_dir / "cappar.toml"), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "validation.json").read_text())["valid"] is True


def test_oracle_check_command(configs_dir, tmp_path):
    assert run_cli("oracle-check", "--config", configs_dir / "cappar.toml", "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "oracle_check.json").read_text())
    assert rep["pass"] and rep["quadrature"]["worst_relative_error"] < 1e-9
    assert set(rep["euler_vs_exact"]["stats"]) == {"r", "x", "pi", "log_S", "log_I"}
