"""End-to-end tests for the symbreak-sim command line driver."""

import json
import os

import pytest

from symbreak import cli


def _run(argv):
    return cli.main(argv)


def test_pt_threshold_writes_all_artifacts(tmp_path):
    code = _run(["pt-threshold", "--out", str(tmp_path),
                 "--J-grid", "0.5:1.5:0.25"])
    assert code == cli.EXIT_OK
    for ext in ("csv", "json", "svg"):
        assert (tmp_path / f"pt-threshold.{ext}").exists()
    header = (tmp_path / "pt-threshold.csv").read_text().splitlines()[0]
    assert "," in header and header == header.strip()


def test_csv_is_deterministic_for_identical_config_and_seed(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        code = _run(["dissipator-identity", "--out", str(out), "--seed", "7",
                     "--format", "csv"])
        assert code == cli.EXIT_OK
    body_a = (out_a / "dissipator-identity.csv").read_bytes()
    body_b = (out_b / "dissipator-identity.csv").read_bytes()
    assert body_a == body_b


def test_format_flag_restricts_outputs(tmp_path):
    code = _run(["pt-threshold", "--out", str(tmp_path), "--format", "json",
                 "--J-grid", "0.5:1.5:0.5"])
    assert code == cli.EXIT_OK
    assert (tmp_path / "pt-threshold.json").exists()
    assert not (tmp_path / "pt-threshold.csv").exists()
    assert not (tmp_path / "pt-threshold.svg").exists()


def test_json_metadata_fields(tmp_path):
    _run(["pt-threshold", "--out", str(tmp_path), "--format", "json",
          "--J-grid", "0.5:1.5:0.5", "--seed", "3"])
    payload = json.loads((tmp_path / "pt-threshold.json").read_text())
    assert payload["experiment"] == "pt-threshold"
    assert payload["seed"] == 3
    assert payload["n_rows"] > 0
    assert "params" in payload and "results" in payload


def test_unknown_experiment_suggests_name(tmp_path, capsys):
    code = _run(["pt-treshold", "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "pt-threshold" in err


def test_unknown_key_is_config_error(tmp_path, capsys):
    code = _run(["pt-threshold", "--out", str(tmp_path), "--kappa-q", "1.0"])
    assert code == cli.EXIT_CONFIG
    assert "kappa-q" in capsys.readouterr().err


def test_missing_required_key_is_config_error(tmp_path, capsys):
    code = _run(["ssh-fock-fidelity", "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG
    assert "xi" in capsys.readouterr().err


def test_negative_rate_is_config_error(tmp_path, capsys):
    code = _run(["pt-threshold", "--out", str(tmp_path), "--kappa-a", "-1"])
    assert code == cli.EXIT_CONFIG
    assert "kappa-a" in capsys.readouterr().err


def test_config_file_and_cli_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "experiment": "dissipator-identity",
        "seed": 11,
        "params": {"n-random": 2, "tol": 1e-10},
    }))
    code = _run(["dissipator-identity", "--config", str(cfg),
                 "--out", str(tmp_path), "--format", "json",
                 "--n-random", "1"])
    assert code == cli.EXIT_OK
    payload = json.loads((tmp_path / "dissipator-identity.json").read_text())
    assert payload["seed"] == 11
    assert payload["params"]["n-random"] == 1


def test_config_experiment_mismatch(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"experiment": "pt-threshold", "params": {}}))
    code = _run(["dissipator-identity", "--config", str(cfg),
                 "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG


def test_validate_accepts_well_formed_config(tmp_path, capsys):
    cfg = tmp_path / "ok.json"
    cfg.write_text(json.dumps({
        "experiment": "ssh-fock-fidelity",
        "params": {"xi": 0.1},
    }))
    code = _run(["validate", str(cfg)])
    assert code == cli.EXIT_OK
    assert "ok" in capsys.readouterr().out


def test_validate_reports_schema_violation(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({
        "experiment": "pt-threshold",
        "params": {"kappa-a": -2.0},
    }))
    code = _run(["validate", str(cfg)])
    assert code == cli.EXIT_CONFIG
    assert "kappa-a" in capsys.readouterr().err


def test_validate_requires_path(capsys):
    assert _run(["validate"]) == cli.EXIT_CONFIG


def test_physics_error_exit_code(tmp_path, capsys):
    code = _run(["dissipator-identity", "--out", str(tmp_path), "--tol", "0"])
    assert code == cli.EXIT_PHYSICS
    assert "physics error" in capsys.readouterr().err


def test_ssh_fock_fidelity_run(tmp_path):
    code = _run(["ssh-fock-fidelity", "--out", str(tmp_path),
                 "--xi", "0.1", "--format", "csv"])
    assert code == cli.EXIT_OK
    lines = (tmp_path / "ssh-fock-fidelity.csv").read_text().splitlines()
    assert lines[0] == "xi,eta,fidelity,infidelity"
    infid = float(lines[1].split(",")[-1])
    assert infid == pytest.approx(0.21062, abs=2e-4)


def test_threads_env_must_be_positive_integer(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SYMBREAK_THREADS", "zero")
    code = _run(["pt-threshold", "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG
