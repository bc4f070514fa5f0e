"""Command-line interface: config handling, artifacts, determinism."""

import json
from pathlib import Path

import pytest

from spinpair.cli import (EXIT_BAD_CONFIG, EXIT_OK, SCHEMA_VERSION,
                          ConfigError, main, read_versioned_json)


def run_cli(tmp_path, *argv, config=None, name="run"):
    out = tmp_path / name
    args = []
    if config is not None:
        cfg_path = tmp_path / f"{name}_config.json"
        cfg_path.write_text(json.dumps(config))
        args += ["--config", str(cfg_path)]
    args += ["--out", str(out)]
    args += list(argv)
    return main(args), out


def test_missing_config_file_is_exit_3(tmp_path):
    code = main(["--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o"), "grover"])
    assert code == EXIT_BAD_CONFIG


def test_unknown_config_key_is_exit_3(tmp_path):
    code, _ = run_cli(tmp_path, "grover", config={"sead": 7})
    assert code == EXIT_BAD_CONFIG


def test_bad_schema_version_is_exit_3(tmp_path):
    code, _ = run_cli(tmp_path, "grover",
                      config={"schema_version": 99})
    assert code == EXIT_BAD_CONFIG


def test_bad_section_value_is_exit_3(tmp_path):
    code, _ = run_cli(tmp_path, "grover",
                      config={"noise": {"model": "loud"}})
    assert code == EXIT_BAD_CONFIG


def test_grover_ideal_artifacts(tmp_path):
    code, out = run_cli(tmp_path, "grover", "--marked", "3")
    assert code == EXIT_OK
    report = read_versioned_json(out / "grover_3_ideal.json")
    assert report["success_rate"] == pytest.approx(1.0, abs=1e-9)
    assert report["marked"] == 3
    assert (out / "grover_3_ideal_spin.csv").exists()


def test_grover_ideal_is_byte_deterministic(tmp_path):
    _, out1 = run_cli(tmp_path, "--seed", "5", "grover", name="a")
    _, out2 = run_cli(tmp_path, "--seed", "5", "grover", name="b")
    a = (out1 / "grover_2_ideal.json").read_bytes()
    b = (out2 / "grover_2_ideal.json").read_bytes()
    assert a == b


def test_qpt_ideal_fidelity_one(tmp_path):
    code, out = run_cli(tmp_path, "qpt", "cphase")
    assert code == EXIT_OK
    report = read_versioned_json(out / "qpt_cphase_ideal.json")
    assert report["process_fidelity"] == pytest.approx(1.0, abs=1e-6)


def test_qst_ideal_artifacts(tmp_path):
    code, out = run_cli(tmp_path, "qst", "hadamard1")
    assert code == EXIT_OK
    report = read_versioned_json(out / "qst_hadamard1_ideal.json")
    assert report["fidelity_vs_ideal"] == pytest.approx(1.0, abs=1e-6)
    assert len(report["rho_spin"]) == 4
    assert (out / "qst_hadamard1_ideal_number.csv").exists()
    assert (out / "qst_hadamard1_ideal_spin.csv").exists()


def test_read_versioned_json_rejects_unknown_schema(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema_version": SCHEMA_VERSION + 1}))
    with pytest.raises(ConfigError):
        read_versioned_json(p)


def test_selectivity_check(tmp_path):
    code, out = run_cli(tmp_path, "multiion-verify", "selectivity")
    assert code == EXIT_OK
    report = read_versioned_json(out / "multiion_selectivity.json")
    assert report["selectivity"]["relative_error"] <= 1e-3


def test_ms_sweep_artifact_shape(tmp_path):
    code, out = run_cli(tmp_path, "multiion-verify", "ms-sweep")
    assert code == EXIT_OK
    report = read_versioned_json(out / "multiion_ms-sweep.json")
    sweep = report["ms_sweep"]
    assert [p["b0_gauss"] for p in sweep["points"]] == [0.0, 2.0, 6.0, 20.0]
    residuals = [p["residual"] for p in sweep["points"]]
    assert residuals == sorted(residuals)
    assert sweep["monotone"] is True
    assert sweep["floor"] == residuals[0]


def test_selectivity_deterministic_across_runs(tmp_path):
    _, out1 = run_cli(tmp_path, "multiion-verify", "selectivity", name="s1")
    _, out2 = run_cli(tmp_path, "multiion-verify", "selectivity", name="s2")
    a = (out1 / "multiion_selectivity.json").read_bytes()
    b = (out2 / "multiion_selectivity.json").read_bytes()
    assert a == b
