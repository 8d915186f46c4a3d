"""Tests for core.storage and core.logger."""

import json
import logging
import sys
import os

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from core.logger import ScalekitLogger, _JsonFormatter, _resolve_level
from core.storage import format_number, render_csv, render_json, write_atomic, write_csv, write_json


# Rendering


class TestRender:
    """Stable text for byte-identical outputs."""

    def test_seventeen_digits(self) -> None:
        assert format_number(0.1) == "0.10000000000000001"
        assert float(format_number(1.0 / 3.0)) == 1.0 / 3.0

    def test_integers_and_flags(self) -> None:
        assert format_number(7) == "7"
        assert format_number(True) == "True"

    def test_csv_line_endings(self) -> None:
        text = render_csv(("y", "density"), [(0.5, 1.0), (1.0, 0.25)])
        assert text == "y,density\n0.5,1\n1,0.25\n"
        assert "\r" not in text

    def test_json_sorted(self) -> None:
        assert render_json({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'


# Atomic writes


class TestWriteAtomic:
    """Files appear whole or not at all."""

    def test_write_and_no_leftovers(self, tmp_path) -> None:
        target = tmp_path / "nested" / "out.csv"
        path = write_csv(str(target), ("sample",), [(1.5,), (2.5,)])
        assert path == str(target)
        assert target.read_bytes() == b"sample\n1.5\n2.5\n"
        assert os.listdir(target.parent) == ["out.csv"]

    def test_overwrite(self, tmp_path) -> None:
        target = tmp_path / "report.json"
        write_json(str(target), {"pass": False})
        write_json(str(target), {"pass": True})
        assert json.loads(target.read_text(encoding="utf-8")) == {"pass": True}

    def test_failure_cleans_up(self, tmp_path, monkeypatch) -> None:
        def refuse(src: str, dst: str) -> None:
            raise OSError("disk full")

        monkeypatch.setattr(os, "replace", refuse)
        with pytest.raises(OSError):
            write_atomic(str(tmp_path / "out.txt"), "data")
        assert os.listdir(tmp_path) == []


# Logging


class TestLogger:
    """Singleton JSON logger."""

    def test_singleton(self) -> None:
        assert ScalekitLogger.get_logger() is ScalekitLogger.get_logger()
        assert ScalekitLogger.get_logger().name == "scalekit"

    def test_extras_in_json(self) -> None:
        record = logging.LogRecord(
            name="scalekit", level=logging.INFO, pathname=__file__, lineno=1,
            msg="Normalized density", args=(), exc_info=None,
        )
        record.psi = 0.5
        record.grid_points = 4096
        entry = json.loads(_JsonFormatter().format(record))
        assert entry["message"] == "Normalized density"
        assert entry["level"] == "INFO"
        assert entry["psi"] == 0.5
        assert entry["grid_points"] == 4096

    def test_numpy_and_non_finite_extras(self) -> None:
        record = logging.LogRecord(
            name="scalekit", level=logging.INFO, pathname=__file__, lineno=1,
            msg="Solved lambda", args=(), exc_info=None,
        )
        record.lam = np.float64(2.0)
        record.bracket = np.array([1e-6, 1e6])
        record.grid = np.linspace(0.0, 1.0, 100)
        record.residual = float("inf")
        entry = json.loads(_JsonFormatter().format(record))
        assert entry["lam"] == 2.0
        assert entry["bracket"] == [1e-6, 1e6]
        assert entry["grid"] == {"shape": [100], "min": 0.0, "max": 1.0}
        assert entry["residual"] == "inf"

    @pytest.mark.parametrize("raw, level", [
        (None, logging.WARNING), ("debug", logging.DEBUG), (" Info ", logging.INFO), ("loud", logging.WARNING),
    ])
    def test_level_names(self, raw, level: int) -> None:
        assert _resolve_level(raw) == level
