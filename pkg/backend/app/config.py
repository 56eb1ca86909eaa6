import os
import logging

from app.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BUDGET = 10_000_000
DEFAULT_SWEEP_MAX_P = 50
DEFAULT_VERIFY_SAMPLES = 50


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 0:
        raise ConfigError(f"{name} must be non-negative, got {value}")
    return value


def oracle_budget() -> int:
    """Maximum number of vectors one finite enumeration may touch."""
    return _int_env("KNOT_ORACLE_BUDGET", DEFAULT_ORACLE_BUDGET)


def sweep_max_prime() -> int:
    return _int_env("KNOT_SWEEP_MAX_P", DEFAULT_SWEEP_MAX_P)


def verify_samples() -> int:
    return _int_env("KNOT_VERIFY_SAMPLES", DEFAULT_VERIFY_SAMPLES)


def verify_seed() -> int:
    return _int_env("KNOT_VERIFY_SEED", 0)


def log_level() -> int:
    name = os.getenv("LOG_LEVEL", "INFO").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigError(f"LOG_LEVEL must be a logging level name, got {name!r}")
    return level
