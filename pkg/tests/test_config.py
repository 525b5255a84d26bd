import json

import pytest

from geometry.base.errors import ConfigError
from utils.config.settings import DEFAULT_CONFIG, load_run_config, read_config_file, resolve_threads, validate_config


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch, tmp_path):
    for name in ("ROTLAB_SEED", "ROTLAB_LOG_LEVEL", "ROTLAB_OUT"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


def test_defaults_are_valid():
    conf = load_run_config()
    assert conf["genus"] == 2
    assert conf["budgets"] == DEFAULT_CONFIG["budgets"]
    assert conf["system"]["name"] == "f3"
    assert conf["threads"] == 2


def test_yaml_file_is_merged(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("genus: 3\nbudgets:\n  n: 50\nsystem:\n  name: identity\n", encoding="utf-8")
    conf = load_run_config(path)
    assert conf["genus"] == 3
    assert conf["budgets"] == {"n": 50, "seeds": 32, "radius": 3}
    assert conf["system"] == {"name": "identity"}


def test_environment_overrides_file(tmp_path, monkeypatch):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 3}), encoding="utf-8")
    monkeypatch.setenv("ROTLAB_SEED", "11")
    monkeypatch.setenv("ROTLAB_LOG_LEVEL", "debug")
    conf = load_run_config(path)
    assert conf["seed"] == 11
    assert conf["log_level"] == "DEBUG"


def test_cli_overrides_win_and_none_is_ignored(monkeypatch):
    monkeypatch.setenv("ROTLAB_SEED", "11")
    conf = load_run_config(overrides={"seed": 5, "out": None, "budgets": {"n": 7, "seeds": None}})
    assert conf["seed"] == 5
    assert conf["out"] == "reports"
    assert conf["budgets"]["n"] == 7
    assert conf["budgets"]["seeds"] == 32


def test_schema_error_points_at_the_field():
    with pytest.raises(ConfigError) as exc:
        load_run_config(overrides={"genus": 1})
    assert exc.value.context["pointer"] == "/genus"


def test_unknown_system_is_rejected():
    conf = dict(DEFAULT_CONFIG, system={"name": "shear"})
    with pytest.raises(ConfigError) as exc:
        validate_config(conf)
    assert exc.value.context["pointer"] == "/system/name"


def test_bad_seed_in_environment(monkeypatch):
    monkeypatch.setenv("ROTLAB_SEED", "many")
    with pytest.raises(ConfigError):
        load_run_config()


def test_missing_or_malformed_file(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "absent.yaml")
    bad = tmp_path / "list.json"
    bad.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_config_file(bad)


def test_resolve_threads(monkeypatch):
    assert resolve_threads(3) == 3
    assert resolve_threads() == 2
    monkeypatch.delenv("ROTLAB_THREADS")
    assert resolve_threads() >= 1
    with pytest.raises(ConfigError) as exc:
        resolve_threads(0)
    assert exc.value.context["pointer"] == "/threads"
    with pytest.raises(ConfigError):
        resolve_threads("many")
