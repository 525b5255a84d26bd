import json
import math

import numpy as np
import pytest

from geometry.base.errors import ConfigError
from utils.reporting.metadata_logger import (
    MetadataLogger,
    build_report_bundle,
    to_jsonable,
    write_report_bundle,
)


@pytest.mark.parametrize("file_format", ["parquet", "csv", "json"])
def test_logger_round_trip(tmp_path, file_format):
    path = tmp_path / f"audit_log.{file_format}"
    ml = MetadataLogger(report_path=str(path), file_format=file_format)
    ml.log({"command": "group build", "report": "group_build.json", "details": {"genus": 2}})
    ml.log_error("Configuración inválida", {"pointer": "/genus"})
    ml.save()
    df = ml.load()
    assert len(df) == 2
    assert set(df["status"]) == {"ok", "error"}


def test_logger_appends_to_previous_runs(tmp_path):
    path = str(tmp_path / "audit_log.parquet")
    first = MetadataLogger(report_path=path)
    first.log({"command": "group build"})
    first.save()
    second = MetadataLogger(report_path=path)
    second.log({"command": "horseshoe audit"})
    second.save()
    assert list(second.load()["command"]) == ["group build", "horseshoe audit"]


def test_format_is_inferred_and_validated(tmp_path):
    assert MetadataLogger(report_path=str(tmp_path / "log.jsonl")).file_format == "json"
    assert MetadataLogger(report_path=str(tmp_path / "log.txt")).file_format == "parquet"
    with pytest.raises(ValueError):
        MetadataLogger(report_path=str(tmp_path / "log.xlsx"), file_format="xlsx")


def test_load_of_missing_file_is_empty(tmp_path):
    assert MetadataLogger(report_path=str(tmp_path / "none.csv")).load().empty


def test_to_jsonable():
    out = to_jsonable({"z": 1 + 2j, "r": math.inf, "a": np.arange(3), "b": np.bool_(True), 3: (np.int64(4),)})
    assert out == {"z": [1.0, 2.0], "r": None, "a": [0, 1, 2], "b": True, "3": [4]}


def test_bundle_is_validated_and_sorted(tmp_path):
    bundle = build_report_bundle("group build", {"genus": 2}, {"residual": np.float64(1e-12)}, wall_clock=0.5)
    path = write_report_bundle(bundle, str(tmp_path / "out" / "group_build.json"))
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    data = json.loads(text)
    assert data["results"]["residual"] == pytest.approx(1e-12)
    assert list(data) == sorted(data)
    assert "numpy" in data["versions"]


def test_invalid_bundle_is_rejected(tmp_path):
    bundle = build_report_bundle("group build", {}, {}, status="maybe")
    with pytest.raises(ConfigError):
        write_report_bundle(bundle, str(tmp_path / "bad.json"))
