import json
import logging

import pytest

from services.worker.tasks import run_sweep_rows
from shared.config import get_settings
from shared.logging import JsonFormatter, configure_logging
from shared.thresholds import ThresholdError


@pytest.fixture(autouse=True)
def _reset_settings_cache():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    logging.getLogger().handlers.clear()
    logging.getLogger().setLevel(logging.WARNING)


def test_defaults():
    settings = get_settings()
    assert settings.threads == 1
    assert settings.sweep_max_degree == 200
    assert settings.interpolation_samples == 7
    assert settings.log_json is True


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("HYPERCERT_THREADS", "3")
    monkeypatch.setenv("HYPERCERT_LOG_LEVEL", "debug")
    monkeypatch.setenv("HYPERCERT_LOG_JSON", "false")
    settings = get_settings()
    assert settings.threads == 3
    assert settings.log_level == "debug"
    assert settings.log_json is False


def test_json_formatter_carries_extras():
    record = logging.LogRecord("hypercert", logging.INFO, __file__, 1, "swept %d degrees", (4,), None)
    record.command = "sweep"
    record.elapsed_ms = 12
    payload = json.loads(JsonFormatter().format(record))
    assert payload == {
        "level": "INFO",
        "logger": "hypercert",
        "message": "swept 4 degrees",
        "command": "sweep",
        "elapsed_ms": 12,
    }


def test_configure_logging_writes_json_to_stderr(monkeypatch, capsys):
    monkeypatch.setenv("HYPERCERT_LOG_LEVEL", "INFO")
    configure_logging()
    run_sweep_rows(5, 7)
    captured = capsys.readouterr()
    assert captured.out == ""
    lines = [json.loads(line) for line in captured.err.splitlines()]
    sweep = [line for line in lines if line.get("command") == "sweep"]
    assert sweep and "elapsed_ms" in sweep[-1]
    assert logging.getLogger().level == logging.INFO


def test_plain_text_logging(monkeypatch, capsys):
    monkeypatch.setenv("HYPERCERT_LOG_JSON", "0")
    configure_logging()
    logging.getLogger("hypercert.test").warning("plain")
    assert capsys.readouterr().err.strip() == "WARNING hypercert.test: plain"


def test_worker_rejects_bad_range():
    with pytest.raises(ThresholdError):
        run_sweep_rows(8, 7)
