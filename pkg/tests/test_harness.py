"""Config validation, CSV determinism, manifests and CLI exit codes."""

import json
import os

import pytest

from photonfqh import ConfigError
from photonfqh.cli import main
from photonfqh.harness import run_mode, sweep_frequency

FREQ_CFG = {
    "mode": "sweep-frequency",
    "nx": 2, "ny": 2, "nphi": 2, "nmax": 2,
    "u": "hardcore", "kappa": 0.04, "beta": 0.01,
    "delta_start": -3.0, "delta_stop": -1.0, "delta_points": 4,
    "observables": ["n_tot", "g2_cm", "overlap"],
}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read(path):
    with open(path) as fh:
        return fh.read()


def test_sweep_frequency_outputs(tmp_path):
    out = tmp_path / "out"
    flagged = sweep_frequency(dict(FREQ_CFG), str(out))
    assert flagged == 0
    for name in ("manifest.json", "results.csv", "diagnostics.json"):
        assert (out / name).exists()
    manifest = json.loads(read(out / "manifest.json"))
    assert manifest["schema_version"] == "1.0"
    assert manifest["mode"] == "sweep-frequency"
    assert manifest["config"]["nphi"] == 2
    assert manifest["seed"] == 0
    assert "start_time" in manifest
    # at alpha = 1/2 conjugation is a symmetry, so only presence is checked
    assert isinstance(manifest["laughlin_convention"], str)
    diag = json.loads(read(out / "diagnostics.json"))
    assert diag["flagged_rows"] == 0
    assert len(diag["points"]) == 4
    header = read(out / "results.csv").splitlines()[0].split(",")
    assert header == manifest["csv_columns"]
    assert header[-2:] == ["flag", "flag_reason"]


def test_csv_is_deterministic_and_thread_invariant(tmp_path):
    out1, out2, out3 = (tmp_path / n for n in ("a", "b", "c"))
    sweep_frequency(dict(FREQ_CFG), str(out1), threads=1)
    sweep_frequency(dict(FREQ_CFG), str(out2), threads=1)
    sweep_frequency(dict(FREQ_CFG), str(out3), threads=2)
    ref = read(out1 / "results.csv")
    assert read(out2 / "results.csv") == ref
    assert read(out3 / "results.csv") == ref


def test_config_validation_errors():
    bad = dict(FREQ_CFG)
    del bad["nx"]
    with pytest.raises(ConfigError):
        sweep_frequency(bad, "/tmp/ignored")
    bad = dict(FREQ_CFG, u="soft")
    with pytest.raises(ConfigError):
        sweep_frequency(bad, "/tmp/ignored")
    bad = dict(FREQ_CFG, observables=["g3_cm"])     # nmax = 2 cannot do g3
    with pytest.raises(ConfigError):
        sweep_frequency(bad, "/tmp/ignored")
    bad = dict(FREQ_CFG, nphi=3)                    # overlap needs even flux
    with pytest.raises(ConfigError):
        sweep_frequency(bad, "/tmp/ignored")
    with pytest.raises(ConfigError):
        run_mode("sweep-size", dict(FREQ_CFG), "/tmp/ignored")


def test_cli_exit_codes(tmp_path):
    cfg_path = write_cfg(tmp_path, FREQ_CFG)
    out = str(tmp_path / "cli_out")
    assert main(["sweep-frequency", "--config", cfg_path, "--out", out]) == 0

    # declared mode must match the subcommand
    assert main(["sweep-interaction", "--config", cfg_path, "--out", out]) == 2

    bad_path = write_cfg(tmp_path, {"nonsense": True}, name="bad.json")
    assert main(["sweep-frequency", "--config", bad_path, "--out", out]) == 2

    notjson = tmp_path / "notjson.json"
    notjson.write_text("{")
    assert main(["sweep-frequency", "--config", str(notjson), "--out", out]) == 2


def test_flagged_rows_give_exit_one(tmp_path):
    # a lattice past the Liouvillian dimension guard flags its rows
    cfg = {
        "mode": "lindblad-validate",
        "lattices": [[2, 2], [4, 4]],
        "betas": [0.01],
        "orders": [1],
        "nmax": 3,
        "kappa": 0.02,
        "delta": -2.0,
        "u": "hardcore",
    }
    cfg_path = write_cfg(tmp_path, cfg)
    out = str(tmp_path / "flag_out")
    assert main(["lindblad-validate", "--config", cfg_path, "--out", out]) == 1
    rows = read(os.path.join(out, "results.csv")).splitlines()[1:]
    flags = [r.split(",")[7] for r in rows]
    assert "1" in flags and "0" in flags
    reasons = [r.split(",")[8] for r in rows]
    assert any("guard" in r or "dimension" in r for r in reasons)


def test_lindblad_validate_scaling_diagnostics(tmp_path):
    cfg = {
        "lattices": [[2, 2]],
        "betas": [0.01, 0.005],
        "orders": [1, 2],
        "nmax": 2,
        "kappa": 0.02,
        "delta": -2.0,
        "u": "hardcore",
    }
    out = tmp_path / "lv"
    flagged = run_mode("lindblad-validate", cfg, str(out))
    assert flagged == 0
    diag = json.loads(read(out / "diagnostics.json"))
    for key, ratio in diag["scaling_ratios"].items():
        assert 2.5 <= ratio <= 6.0, key


def test_sweep_size_fqh_branch(tmp_path):
    cfg = {
        "nphi": 2, "nmax": 2,
        "u": "hardcore", "kappa": 0.04, "beta": 0.01,
        "sizes": [[3, 3], [4, 4]],
        "branch": "fqh",
        "delta_mode": "auto",
        "auto_points": 5,
        "observables": ["n_tot", "g2_cm"],
    }
    out = tmp_path / "size"
    flagged = run_mode("sweep-size", cfg, str(out))
    assert flagged == 0
    lines = read(out / "results.csv").splitlines()
    assert len(lines) == 3
    header = lines[0].split(",")
    for col in ("area", "branch", "delta_u", "g2max_estimate", "overlap_span"):
        assert col in header


def test_protocol_mode_outputs(tmp_path):
    cfg = {"points_per_stage": 8}
    out = tmp_path / "proto"
    flagged = run_mode("protocol", cfg, str(out))
    assert flagged == 0
    lines = read(out / "results.csv").splitlines()
    assert len(lines) == 1 + 5 * 8
    diag = json.loads(read(out / "diagnostics.json"))
    assert diag["mott_overlap"] > 0.99
    assert diag["final_overlap_pair"] > 0.9
    assert set(diag["min_gap_by_stage"]) == {
        "pin", "impurity_on", "flux_on", "melt", "impurity_off"
    }
