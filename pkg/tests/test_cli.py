import json
import os

import pandas as pd
import pytest

from cli.main import EXIT_ERROR, EXIT_OK, main


@pytest.fixture(autouse=True)
def _quiet_env(monkeypatch, tmp_path):
    for name in ("ROTLAB_SEED", "ROTLAB_LOG_LEVEL", "ROTLAB_OUT"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


def _write_config(tmp_path, data) -> str:
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def _bundle(out, command) -> dict:
    with open(os.path.join(out, "_".join(command.split()) + ".json"), encoding="utf-8") as fh:
        return json.load(fh)


def test_group_build_writes_bundle_and_audit_log(tmp_path):
    out = str(tmp_path / "reports")
    assert main(["group", "build", "--out", out, "--radius", "1"]) == EXIT_OK
    bundle = _bundle(out, "group build")
    assert bundle["status"] == "ok"
    assert bundle["results"]["relator_residual"] < 1e-8
    assert bundle["results"]["ball_sizes"] == {"0": 1, "1": 9}
    log = pd.read_parquet(os.path.join(out, "audit_log.parquet"))
    assert list(log["command"]) == ["group build"]


def test_geodesic_axis_command(tmp_path):
    out = str(tmp_path / "reports")
    assert main(["geodesic", "axis", "a1", "--out", out]) == EXIT_OK
    assert _bundle(out, "geodesic axis")["results"]["translation_length"] > 0.0


def test_rotset_estimate_for_identity(tmp_path):
    out = str(tmp_path / "reports")
    config = _write_config(tmp_path, {"system": {"name": "identity"},
                                      "budgets": {"n": 5, "seeds": 4, "radius": 1}})
    assert main(["rotset", "estimate", "--config", config, "--out", out]) == EXIT_OK
    results = _bundle(out, "rotset estimate")["results"]
    assert results["directions"] == {}
    assert results["direction_set"] == []
    assert len(pd.read_parquet(results["samples_table"])) == 4


def test_horseshoe_audit_uses_the_affine_model(tmp_path):
    out = str(tmp_path / "reports")
    config = _write_config(tmp_path, {"horseshoe": {"max_period": 3}})
    assert main(["horseshoe", "audit", "--config", config, "--out", out]) == EXIT_OK
    results = _bundle(out, "horseshoe audit")["results"]
    assert results["passed"]
    assert results["details"]["periodic"]["found"] == 2 + 4 + 8


def test_invalid_config_exits_with_error(tmp_path):
    config = _write_config(tmp_path, {"genus": "two"})
    assert main(["group", "build", "--config", config, "--out", str(tmp_path / "reports")]) == EXIT_ERROR


def test_unknown_word_exits_with_error(tmp_path):
    out = str(tmp_path / "reports")
    assert main(["geodesic", "axis", "a7", "--out", out]) == EXIT_ERROR
    log = pd.read_parquet(os.path.join(out, "audit_log.parquet"))
    assert list(log["status"]) == ["error"]


def test_plot_disk_writes_svg(tmp_path):
    out = str(tmp_path / "reports")
    assert main(["plot", "disk", "--out", out, "--tiling-radius", "1", "--words", "a1"]) == EXIT_OK
    with open(os.path.join(out, "disk.svg"), encoding="utf-8") as fh:
        assert "<svg" in fh.read()
    assert _bundle(out, "plot disk")["figures"] == [os.path.join(out, "disk.svg")]
