"""
Environment-driven settings.

Values are read from the process environment, optionally populated from a
.env file in the working directory.
"""

import os
import logging
from dataclasses import dataclass

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # python-dotenv not installed, plain environment only
    pass


DEFAULT_N_POINTS = 5001


@dataclass(frozen=True)
class Settings:
    """Runtime knobs shared by the library and the CLI."""
    threads: int = 1
    n_points: int = DEFAULT_N_POINTS
    log_level: str = "WARNING"

    @property
    def log_level_value(self) -> int:
        return getattr(logging, self.log_level.upper(), logging.WARNING)


def _int_from_env(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(value, minimum)


def get_settings() -> Settings:
    """Read settings from the environment (re-read on every call)."""
    return Settings(
        threads=_int_from_env("TRANSMUTE_THREADS", 1, 1),
        n_points=_int_from_env("TRANSMUTE_N_POINTS", DEFAULT_N_POINTS, 2),
        log_level=os.getenv("TRANSMUTE_LOG_LEVEL", "WARNING"),
    )
