"""Verifier configuration loaded from environment variables."""

import functools

from pydantic import Field
from pydantic_settings import BaseSettings

from verifier.constants import LogFormat


class VerifierSettings(BaseSettings):
    """Process-wide settings; per-check parameters live in ``CheckConfig``."""

    # Harness
    JOBS: int = Field(default=1, ge=1)

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: LogFormat = LogFormat.JSON

    # Reports
    REPORT_RUNTIME: bool = False
    REPORT_DIR: str = "reports"
    FLOAT_DIGITS: int = Field(default=17, ge=1, le=17)

    model_config = {"env_prefix": "H1LAB_"}


@functools.lru_cache(maxsize=1)
def get_settings() -> VerifierSettings:
    """Return cached verifier settings singleton."""
    return VerifierSettings()
