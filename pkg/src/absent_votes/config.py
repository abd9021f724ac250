"""Configuration loading and validation."""

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .rxc3 import DEFAULT_COVER_BUDGET
from .wav import DEFAULT_BUDGET

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "absent-votes" / "config.toml"


@dataclass
class SolverSettings:
    """Limits and parallelism for the exhaustive solvers."""

    budget: int = DEFAULT_BUDGET
    workers: int = 1
    cover_budget: int = DEFAULT_COVER_BUDGET


@dataclass
class Config:
    """Main configuration container."""

    log_dir: Path | None = None
    log_retention_days: int = 7
    solver: SolverSettings = field(default_factory=SolverSettings)


class ConfigError(Exception):
    """Configuration loading or validation error."""


def load_config(path: Path) -> Config:
    """Load and validate configuration from a TOML file."""
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")

    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML: {e}") from e

    return _parse_config(data)


def load_config_or_default(path: Path | None) -> Config:
    """Explicit paths must exist; the default path is optional."""
    if path is not None:
        return load_config(path)
    if DEFAULT_CONFIG_PATH.exists():
        return load_config(DEFAULT_CONFIG_PATH)
    return Config()


def _int_field(section: dict, key: str, name: str, default: int, minimum: int) -> int:
    value = section.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        kind = "a positive integer" if minimum > 0 else "a non-negative integer"
        raise ConfigError(f"{name} must be {kind}, got {value!r}")
    return value


def _parse_config(data: dict) -> Config:
    """Parse and validate configuration data."""
    general = data.get("general", {})
    solver = data.get("solver", {})

    log_dir_str = general.get("log_dir")
    if log_dir_str is not None and not isinstance(log_dir_str, str):
        raise ConfigError(f"general.log_dir must be a path string, got {log_dir_str!r}")

    return Config(
        log_dir=Path(log_dir_str).expanduser() if log_dir_str else None,
        log_retention_days=_int_field(
            general, "log_retention_days", "general.log_retention_days", 7, 0
        ),
        solver=SolverSettings(
            budget=_int_field(solver, "budget", "solver.budget", DEFAULT_BUDGET, 1),
            workers=_int_field(solver, "workers", "solver.workers", 1, 0),
            cover_budget=_int_field(
                solver, "cover_budget", "solver.cover_budget", DEFAULT_COVER_BUDGET, 1
            ),
        ),
    )
