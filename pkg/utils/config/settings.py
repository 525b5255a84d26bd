"""
Module: settings.py

Descripción:
    Configuración de ejecución (RunConfig) de rotlab. Se parte de DEFAULT_CONFIG, se fusiona el
    archivo JSON o YAML indicado, luego las variables de entorno ROTLAB_* (cargadas también desde
    un .env con python-dotenv) y por último los flags de la CLI. El resultado se valida con
    jsonschema contra schemas/run_config.v1.json.

Funcionalidades:
    - load_run_config(path, overrides): RunConfig validada (dict).
    - validate_config(conf, schema_name): lanza ConfigError con el puntero JSON del campo ofensivo.
    - resolve_threads(requested): número de hilos para ThreadPoolExecutor (ROTLAB_THREADS).
"""

import copy
import json
import logging
import os
from pathlib import Path

import yaml
from dotenv import load_dotenv
from jsonschema import Draft202012Validator

from geometry.base.errors import ConfigError

logger = logging.getLogger(__name__)

ENV_PREFIX = "ROTLAB_"
SCHEMA_DIR = Path(__file__).resolve().parents[2] / "schemas"
RUN_CONFIG_SCHEMA = "run_config.v1.json"

DEFAULT_CONFIG = {
    "schema_version": "run_config.v1",
    "genus": 2,
    "seed": 0,
    "threads": None,
    "out": "reports",
    "log_level": "INFO",
    "budgets": {"n": 200, "seeds": 32, "radius": 3},
    "system": {"name": "f3"},
    "rotation": {},
    "periodic": {},
    "horseshoe": {},
}


def resolve_threads(requested=None) -> int:
    """Hilos pedidos, o ROTLAB_THREADS, o el número de CPUs."""
    value = requested if requested is not None else os.getenv(f"{ENV_PREFIX}THREADS")
    if value in (None, ""):
        return max(1, os.cpu_count() or 1)
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Número de hilos no válido: {value!r}", {"pointer": "/threads"})
    if threads < 1:
        raise ConfigError("El número de hilos debe ser >= 1", {"pointer": "/threads", "value": threads})
    return threads


def _deep_update(base: dict, other: dict) -> dict:
    for key, value in other.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def load_schema(name: str = RUN_CONFIG_SCHEMA) -> dict:
    with open(SCHEMA_DIR / name, encoding="utf-8") as fh:
        return json.load(fh)


def validate_config(conf: dict, schema_name: str = RUN_CONFIG_SCHEMA) -> dict:
    validator = Draft202012Validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(conf), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        pointer = "/" + "/".join(str(p) for p in first.absolute_path)
        raise ConfigError(f"Configuración inválida en {pointer}: {first.message}",
                          {"pointer": pointer, "errors": len(errors)})
    return conf


def read_config_file(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"No existe el archivo de configuración: {path}", {"pointer": ""})
    with open(path, encoding="utf-8") as fh:
        try:
            if path.suffix.lower() in (".yaml", ".yml"):
                data = yaml.safe_load(fh) or {}
            else:
                data = json.load(fh)
        except (yaml.YAMLError, json.JSONDecodeError) as exc:
            raise ConfigError(f"No se pudo leer {path}: {exc}", {"pointer": ""})
    if not isinstance(data, dict):
        raise ConfigError("La configuración debe ser un objeto", {"pointer": ""})
    return data


def _env_overrides() -> dict:
    env = {}
    if os.getenv(f"{ENV_PREFIX}SEED"):
        try:
            env["seed"] = int(os.getenv(f"{ENV_PREFIX}SEED"))
        except ValueError:
            raise ConfigError("ROTLAB_SEED debe ser un entero", {"pointer": "/seed"})
    if os.getenv(f"{ENV_PREFIX}THREADS"):
        env["threads"] = resolve_threads()
    if os.getenv(f"{ENV_PREFIX}LOG_LEVEL"):
        env["log_level"] = os.getenv(f"{ENV_PREFIX}LOG_LEVEL").upper()
    if os.getenv(f"{ENV_PREFIX}OUT"):
        env["out"] = os.getenv(f"{ENV_PREFIX}OUT")
    return env


def load_run_config(path=None, overrides: dict = None) -> dict:
    """
    DEFAULT_CONFIG <- archivo <- entorno <- overrides (los valores None de overrides se ignoran).
    """
    load_dotenv()
    conf = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        _deep_update(conf, read_config_file(path))
    _deep_update(conf, _env_overrides())
    if overrides:
        clean = {k: v for k, v in overrides.items() if v is not None}
        if isinstance(clean.get("budgets"), dict):
            clean["budgets"] = {k: v for k, v in clean["budgets"].items() if v is not None}
        _deep_update(conf, clean)
    validate_config(conf)
    logger.debug("RunConfig resuelta: %s", conf)
    return conf
