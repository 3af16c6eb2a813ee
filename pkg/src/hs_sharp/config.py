"""Configuration management for hs-sharp.

Settings come from the environment and, for the CLI's ``--config`` option,
from a flat key=value file read as a dotenv file.
"""
from functools import lru_cache
from typing import Optional

from pydantic import AliasChoices, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .schemas import QuadratureSpec


class Settings(BaseSettings):
    """Quadrature defaults, parallelism and logging."""

    model_config = SettingsConfigDict(env_file=None, case_sensitive=False, extra="forbid")

    # Quadrature
    base_order: int = Field(32, ge=2)
    max_refinements: int = Field(10, ge=0)
    abs_tol: float = Field(1e-12, ge=0)
    rel_tol: float = Field(1e-10, ge=0)

    # Parallelism
    threads: Optional[int] = Field(
        None, ge=1, validation_alias=AliasChoices("threads", "hs_sharp_threads")
    )

    # Logging
    log_level: str = Field("WARNING", validation_alias=AliasChoices("log_level", "hs_sharp_log_level"))

    @field_validator("log_level")
    @classmethod
    def check_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v!r}")
        return level

    def quadrature_spec(self) -> QuadratureSpec:
        """QuadratureSpec with the configured overrides."""
        return QuadratureSpec(
            base_order=self.base_order,
            max_refinements=self.max_refinements,
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
        )


@lru_cache()
def get_settings(config_path: Optional[str] = None) -> Settings:
    """Get cached settings, optionally overlaid by a key=value file."""
    if config_path is None:
        return Settings()
    return Settings(_env_file=config_path)


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: the explicit argument, else HS_SHARP_THREADS, else 1."""
    if threads is not None:
        return max(1, int(threads))
    configured = get_settings().threads
    return configured if configured is not None else 1
