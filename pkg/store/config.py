import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import List

from dotenv import load_dotenv
from pydantic import BaseModel, field_validator

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


class Settings(BaseModel):
    threads: int = 0
    log_level: str = "INFO"
    host: str = "0.0.0.0"
    port: int = 9090
    data_dir: Path = Path("runs")
    cors_origins: List[str] = []

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v):
        if v < 0:
            raise ValueError("PEAKSHARP_THREADS must be >= 0 (0 = auto)")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        v = v.upper()
        if v not in LOG_LEVELS:
            raise ValueError(f"PEAKSHARP_LOG_LEVEL must be one of {sorted(LOG_LEVELS)}")
        return v

    @property
    def n_jobs(self) -> int:
        """joblib worker count: -1 lets joblib use every core."""
        return -1 if self.threads == 0 else self.threads


def validate_env_vars() -> dict:
    """Read PEAKSHARP_* variables, failing with the list of malformed ones."""
    raw = {
        "PEAKSHARP_THREADS": os.getenv("PEAKSHARP_THREADS", "0"),
        "PEAKSHARP_LOG_LEVEL": os.getenv("PEAKSHARP_LOG_LEVEL", "INFO"),
        "PEAKSHARP_HOST": os.getenv("PEAKSHARP_HOST", "0.0.0.0"),
        "PEAKSHARP_PORT": os.getenv("PEAKSHARP_PORT", "9090"),
        "PEAKSHARP_DATA_DIR": os.getenv("PEAKSHARP_DATA_DIR", "runs"),
        "PEAKSHARP_CORS_ORIGINS": os.getenv("PEAKSHARP_CORS_ORIGINS", ""),
    }

    bad_vars = [var for var in ("PEAKSHARP_THREADS", "PEAKSHARP_PORT")
                if not raw[var].strip().isdigit()]
    if bad_vars:
        raise ValueError(f"Malformed environment variables (expected non-negative integers): {', '.join(bad_vars)}")
    return raw


def load_settings() -> Settings:
    raw = validate_env_vars()
    origins = [origin.strip() for origin in raw["PEAKSHARP_CORS_ORIGINS"].split(",") if origin.strip()]
    return Settings(
        threads=int(raw["PEAKSHARP_THREADS"]),
        log_level=raw["PEAKSHARP_LOG_LEVEL"],
        host=raw["PEAKSHARP_HOST"],
        port=int(raw["PEAKSHARP_PORT"]),
        data_dir=Path(raw["PEAKSHARP_DATA_DIR"]),
        cors_origins=origins,
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


def check_storage_health(settings: Settings | None = None) -> dict:
    """Check that the run output directory can be created and written."""
    settings = settings or get_settings()
    try:
        settings.data_dir.mkdir(parents=True, exist_ok=True)
        marker = settings.data_dir / ".write-check"
        marker.write_text("ok")
        marker.unlink()
        return {"status": "writable", "data_dir": str(settings.data_dir)}
    except OSError as e:
        logger.warning("data dir %s is not writable: %s", settings.data_dir, e)
        return {"status": "failed", "data_dir": str(settings.data_dir), "error": str(e)}
