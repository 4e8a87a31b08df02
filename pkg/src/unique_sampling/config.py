"""Run configuration.

Settings are resolved per field from an explicit argument, then the
environment (after loading a ``.env`` file), then a built-in default.
"""

from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Any, Literal

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigurationError

__all__ = [
    "ENV_PREFIX",
    "Method",
    "RunConfig",
    "Settings",
    "load_settings",
]

ENV_PREFIX = "UNIQUE_SAMPLING_"

Method = Literal["iid", "wor", "sbs", "batched"]

_LOG_LEVELS = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}


def _resolve_first(*values: Any) -> Any:
    """Return the first value that is neither ``None`` nor an empty string."""

    for value in values:
        if value is not None and value != "":
            return value
    return None


def _validation_message(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'config'}: {item['msg']}" for item in error.errors()
    )


class Settings(BaseModel):
    """Process-wide defaults."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=0, ge=0, lt=2**64)
    trials: int = Field(default=2000, ge=1)
    max_traces: int = Field(default=10**6, ge=1)
    log_level: str = "WARNING"
    max_workers: int | None = Field(default=None, ge=1)

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        level = value.strip().upper()
        if level not in _LOG_LEVELS:
            raise ValueError(f"log level must be one of {sorted(_LOG_LEVELS)}")
        return level

    @property
    def logging_level(self) -> int:
        return logging.getLevelName(self.log_level)


def load_settings(
    *,
    seed: int | None = None,
    trials: int | None = None,
    max_traces: int | None = None,
    log_level: str | None = None,
    max_workers: int | None = None,
    env_file: str | Path | None = None,
) -> Settings:
    """Build :class:`Settings`; explicit arguments win over ``UNIQUE_SAMPLING_*`` variables.

    Raises :class:`ConfigurationError` if the resolved values are invalid.
    """

    load_dotenv(env_file if env_file is not None else find_dotenv(usecwd=True), override=False)
    explicit = {
        "seed": seed,
        "trials": trials,
        "max_traces": max_traces,
        "log_level": log_level,
        "max_workers": max_workers,
    }
    values: dict[str, Any] = {}
    for name, value in explicit.items():
        resolved = _resolve_first(value, os.getenv(f"{ENV_PREFIX}{name.upper()}"))
        if resolved is not None:
            values[name] = resolved
    try:
        return Settings.model_validate(values)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid settings: {_validation_message(exc)}") from exc


class RunConfig(BaseModel):
    """Validated options of one CLI command."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=0, ge=0, lt=2**64)
    method: Method = "wor"
    k: int = Field(default=10, ge=0)
    batch_size: int = Field(default=1, ge=1)
    temperature: float | None = None
    trials: int = Field(default=2000, ge=1)
    max_traces: int = Field(default=10**6, ge=1)
    out: Path | None = None
    max_workers: int | None = Field(default=None, ge=1)

    @field_validator("temperature")
    @classmethod
    def _check_temperature(cls, value: float | None) -> float | None:
        if value is None:
            return None
        if math.isnan(value) or value < 0.0:
            raise ValueError("temperature must be non-negative or inf")
        return value

    @model_validator(mode="after")
    def _cap_batch_size(self) -> RunConfig:
        if self.k > 0 and self.batch_size > self.k:
            object.__setattr__(self, "batch_size", self.k)
        return self

    @classmethod
    def build(cls, **values: Any) -> RunConfig:
        """Validate ``values``; ``None`` entries fall back to the field defaults."""

        try:
            return cls.model_validate({key: value for key, value in values.items() if value is not None})
        except ValidationError as exc:
            raise ConfigurationError(f"Invalid configuration: {_validation_message(exc)}") from exc
