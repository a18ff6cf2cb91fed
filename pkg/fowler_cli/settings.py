"""Process settings loaded from environment variables."""

from __future__ import annotations

import os

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class FowlerSettings(BaseSettings):
    """Runtime settings for the ``fowler`` command."""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    threads: int | None = Field(default=None, ge=1, alias="FOWLER_THREADS")
    log_level: str = Field(default="WARNING", alias="FOWLER_LOG_LEVEL")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, value: str) -> str:
        level = value.strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level '{value}'")
        return level

    def worker_count(self, override: int | None = None) -> int:
        """``--workers`` beats FOWLER_THREADS, which beats the core count."""
        if override is not None:
            return max(1, override)
        if self.threads is not None:
            return self.threads
        return os.cpu_count() or 1
