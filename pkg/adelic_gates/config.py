"""
Runtime settings for adelic_gates, read from environment variables.

    ADELIC_GATES_LOG_LEVEL   log level for the library loggers (WARNING)
    ADELIC_GATES_BFS_BUDGET  element budget for the generation oracle (100000)
    ADELIC_GATES_NORM_TOL    tolerance for accumulated state norms (1e-9)
    ADELIC_GATES_GATE_TOL    tolerance for single-gate matrix identities (1e-12)
    ADELIC_GATES_JOBS        default number of parallel CLI jobs (1)
"""

import logging
import os
from functools import lru_cache

from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger("adelic_gates.config")

ENV_PREFIX = "ADELIC_GATES_"


class Settings(BaseModel):
    log_level: str = "WARNING"
    bfs_budget: int = Field(default=100_000, ge=1)
    norm_tolerance: float = Field(default=1e-9, gt=0)
    gate_tolerance: float = Field(default=1e-12, gt=0)
    jobs: int = Field(default=1, ge=1)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return value

    @property
    def log_level_number(self) -> int:
        return getattr(logging, self.log_level)


_ENV_FIELDS = {
    "log_level": "LOG_LEVEL",
    "bfs_budget": "BFS_BUDGET",
    "norm_tolerance": "NORM_TOL",
    "gate_tolerance": "GATE_TOL",
    "jobs": "JOBS",
}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build the settings once from the environment; pydantic coerces the strings."""
    values = {}
    for field_name, suffix in _ENV_FIELDS.items():
        raw = os.getenv(ENV_PREFIX + suffix)
        if raw is not None:
            values[field_name] = raw
    settings = Settings(**values)
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings


def reset_settings() -> None:
    """Forget the cached settings so the next get_settings() re-reads the environment."""
    get_settings.cache_clear()
