"""
Module: metadata_logger.py

Descripción:
    Persistencia de resultados de rotlab. MetadataLogger mantiene el rastro de auditoría de cada
    comando ejecutado (uuid, timestamp, estado, comando, ruta del informe) y lo guarda en Parquet,
    CSV o JSON Lines con pandas. write_report_bundle escribe el informe completo de un comando
    (ReportBundle) como JSON con claves ordenadas, validado contra schemas/report_bundle.v1.json.

Funcionalidades:
    - log(metadata: dict): registra un evento con uuid, marca temporal y estado.
    - log_error(error_msg: str, context: dict = None): registra un error con su contexto.
    - save(): guarda los registros acumulados (concatenando con el archivo previo).
    - load() -> pd.DataFrame: carga los registros guardados.
    - build_report_bundle(...) / write_report_bundle(bundle, path).

Ejemplo:
    >>> ml = MetadataLogger(report_path="reports/audit_log.csv", file_format="csv")
    >>> ml.log({"command": "rotset estimate", "report": "reports/rotset.json"})
    >>> ml.log_error("Configuración inválida", {"pointer": "/genus"})
    >>> ml.save()
    >>> df_logs = ml.load()
"""

import json
import logging
import os
import uuid
from datetime import datetime, timezone
from importlib import metadata as importlib_metadata

import numpy as np
import pandas as pd

from utils.config.settings import validate_config

REPORT_SCHEMA = "report_bundle.v1.json"
TRACKED_PACKAGES = ("numpy", "scipy", "pandas", "matplotlib", "jsonschema")


class MetadataLogger:
    """
    Rastro de auditoría de las ejecuciones de la CLI.

    Parámetros de inicialización:
      - report_path (str): archivo donde se guardan los registros.
      - file_format (str): 'parquet', 'csv' o 'json' (JSON Lines). Si no se indica se infiere
                           de la extensión de report_path (por defecto 'parquet').
    """

    SUPPORTED_FORMATS = ['parquet', 'csv', 'json']

    def __init__(self, report_path: str = "reports/audit_log.parquet", file_format: str = None):
        self.records = []
        self.report_path = report_path
        folder = os.path.dirname(report_path)
        if folder:
            os.makedirs(folder, exist_ok=True)

        if file_format is None:
            ext = os.path.splitext(report_path)[1].lower().replace('.', '')
            ext = 'json' if ext == 'jsonl' else ext
            self.file_format = ext if ext in self.SUPPORTED_FORMATS else 'parquet'
        else:
            if file_format.lower() not in self.SUPPORTED_FORMATS:
                raise ValueError(f"Formato no soportado. Los formatos soportados son: {self.SUPPORTED_FORMATS}")
            self.file_format = file_format.lower()

        self.logger = logging.getLogger(__name__)
        self.logger.debug("MetadataLogger inicializado con report_path='%s' y file_format='%s'",
                          self.report_path, self.file_format)

    @staticmethod
    def _flatten(metadata: dict) -> dict:
        # Las columnas anidadas se guardan como texto JSON para que el esquema sea estable.
        return {k: json.dumps(v, sort_keys=True, default=str) if isinstance(v, (dict, list)) else v
                for k, v in metadata.items()}

    def log(self, metadata: dict) -> None:
        record = dict(metadata)
        record["uuid"] = str(uuid.uuid4())
        record["timestamp"] = datetime.now(timezone.utc).isoformat()
        record.setdefault("status", "ok")
        self.records.append(self._flatten(record))
        self.logger.debug("Registro de ejecución: %s", record)

    def log_error(self, error_msg: str, context: dict = None) -> None:
        record = {
            "uuid": str(uuid.uuid4()),
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "status": "error",
            "message": error_msg,
            "context": context or {},
        }
        self.records.append(self._flatten(record))
        self.logger.error("Error registrado: %s", error_msg)

    def save(self) -> None:
        df = pd.DataFrame(self.records)
        if os.path.exists(self.report_path):
            try:
                existing_df = self.load()
                df = pd.concat([existing_df, df], ignore_index=True)
            except Exception as e:
                self.logger.warning("No se pudo leer el archivo existente: %s", e)
        if "uuid" in df.columns:
            df = df.drop_duplicates(subset="uuid")
        df = df.astype(object).where(df.notna(), None)

        try:
            if self.file_format == 'parquet':
                df.astype(str).to_parquet(self.report_path, index=False, engine="pyarrow")
            elif self.file_format == 'csv':
                df.to_csv(self.report_path, index=False)
            else:
                df.to_json(self.report_path, orient="records", lines=True)
            self.logger.info("Rastro de auditoría guardado en %s (%s)", self.report_path, self.file_format)
        except Exception as e:
            self.logger.error("Error al guardar el rastro en %s: %s", self.report_path, e)

    def load(self) -> pd.DataFrame:
        if not os.path.exists(self.report_path):
            self.logger.warning("Archivo de rastro no encontrado: %s", self.report_path)
            return pd.DataFrame()
        try:
            if self.file_format == 'parquet':
                return pd.read_parquet(self.report_path)
            if self.file_format == 'csv':
                return pd.read_csv(self.report_path)
            return pd.read_json(self.report_path, orient="records", lines=True)
        except Exception as e:
            self.logger.error("Error al cargar el rastro: %s", e)
            return pd.DataFrame()


def package_versions() -> dict:
    versions = {}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = importlib_metadata.version(name)
        except importlib_metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def to_jsonable(value):
    """Convierte complejos, arrays y escalares de numpy a tipos JSON."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def build_report_bundle(command: str, config: dict, results: dict, figures=None,
                        wall_clock: float = 0.0, status: str = "ok") -> dict:
    return {
        "schema_version": "report_bundle.v1",
        "execution_id": str(uuid.uuid4()),
        "command": command,
        "config": to_jsonable(config),
        "results": to_jsonable(results),
        "figures": [str(f) for f in (figures or [])],
        "versions": package_versions(),
        "wall_clock": float(wall_clock),
        "status": status,
    }


def write_report_bundle(bundle: dict, path: str) -> str:
    validate_config(bundle, REPORT_SCHEMA)
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle, fh, sort_keys=True, indent=2)
    logging.getLogger(__name__).info("Informe escrito en %s", path)
    return path
