from pathlib import Path

import pytest
from pydantic import ValidationError

from store.config import Settings, check_storage_health, get_settings, load_settings, validate_env_vars
from utils.parallel import parallel_map, resolve_n_jobs
from utils.validation import parse_range, validate_mode, validate_source_count, validate_weight_text


def test_defaults(monkeypatch):
    for var in ("PEAKSHARP_THREADS", "PEAKSHARP_DATA_DIR", "PEAKSHARP_LOG_LEVEL", "PEAKSHARP_PORT"):
        monkeypatch.delenv(var, raising=False)
    settings = load_settings()
    assert settings.threads == 0
    assert settings.n_jobs == -1
    assert settings.port == 9090
    assert settings.log_level == "INFO"
    assert settings.data_dir == Path("runs")


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("PEAKSHARP_THREADS", "3")
    monkeypatch.setenv("PEAKSHARP_LOG_LEVEL", "debug")
    monkeypatch.setenv("PEAKSHARP_CORS_ORIGINS", "http://a.test, http://b.test")
    settings = load_settings()
    assert settings.n_jobs == 3
    assert settings.log_level == "DEBUG"
    assert settings.cors_origins == ["http://a.test", "http://b.test"]
    assert settings.data_dir == tmp_path / "runs"


def test_settings_are_cached():
    assert get_settings() is get_settings()


@pytest.mark.parametrize("var, value", [("PEAKSHARP_THREADS", "-1"), ("PEAKSHARP_PORT", "http")])
def test_malformed_integers(monkeypatch, var, value):
    monkeypatch.setenv(var, value)
    with pytest.raises(ValueError, match=var):
        validate_env_vars()


def test_unknown_log_level(monkeypatch):
    monkeypatch.setenv("PEAKSHARP_LOG_LEVEL", "chatty")
    with pytest.raises(ValidationError):
        load_settings()


def test_storage_health(tmp_path):
    assert check_storage_health(Settings(data_dir=tmp_path / "out"))["status"] == "writable"
    blocker = tmp_path / "file"
    blocker.write_text("")
    report = check_storage_health(Settings(data_dir=blocker))
    assert report["status"] == "failed"
    assert "error" in report


def test_parallel_map_keeps_order():
    items = list(range(20))
    assert parallel_map(lambda x: x * x, items, n_jobs=4) == [x * x for x in items]
    assert parallel_map(lambda x: x + 1, [1], n_jobs=4) == [2]
    assert resolve_n_jobs() == 1
    assert resolve_n_jobs(2) == 2


@pytest.mark.parametrize("text, ok", [
    ("off", True), ("auto", True), ("AUTO:0.5", True), ("12.5", True),
    ("auto:0", False), ("auto:1.5", False), ("-3", False), ("0", False), ("inf", False), ("sharp", False),
])
def test_weight_text(text, ok):
    assert validate_weight_text(text)[0] is ok


def test_mode_and_source_count():
    assert validate_mode("nnp")[0]
    assert not validate_mode("pca")[0]
    assert validate_source_count(2)[0]
    assert not validate_source_count(1)[0]


def test_parse_range():
    assert parse_range("5:100:5") == [float(k) for k in range(5, 101, 5)]
    assert parse_range("30:32") == [30.0, 31.0, 32.0]
    assert parse_range("0.1:0.3:0.1") == pytest.approx([0.1, 0.2, 0.3])
    for bad in ("5", "5:1", "1:5:0", "a:b"):
        with pytest.raises(ValueError):
            parse_range(bad)
