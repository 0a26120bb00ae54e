"""Compiler configuration using Pydantic Settings.

Loads settings from FLATPACK_* environment variables and an optional .env
file. Fabrication values here are only the last-resort defaults; spec files
and command-line flags override them (see flatpack.core.fabrication).
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Valid Python logging levels
VALID_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


class Settings(BaseSettings):
    """Compiler-wide configuration loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="FLATPACK_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # --- Logging ---
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate and normalize log level to uppercase.

        Falls back to WARNING if an invalid level is provided.
        """
        normalized = v.upper().strip()
        if normalized not in VALID_LOG_LEVELS:
            # Logging is not configured yet, so report on stderr
            import sys

            print(
                f"WARNING: Invalid FLATPACK_LOG_LEVEL '{v}'. "
                f"Valid levels are: {', '.join(sorted(VALID_LOG_LEVELS))}. "
                "Falling back to WARNING.",
                file=sys.stderr,
            )
            return "WARNING"
        return normalized

    def get_log_level_int(self) -> int:
        """Return the integer value of the configured log level."""
        return getattr(logging, self.log_level, logging.WARNING)

    # --- Library ---
    # os.pathsep-separated directories searched for template and design files
    library_path: str = ""

    def library_dirs(self) -> list[Path]:
        """Return the configured library directories that exist."""
        dirs = []
        for chunk in self.library_path.split(os.pathsep):
            chunk = chunk.strip()
            if chunk and Path(chunk).is_dir():
                dirs.append(Path(chunk))
        return dirs

    # --- Fabrication defaults (3 mm plywood on a laser cutter) ---
    material: str = "plywood"
    thickness: float = 3.0
    kerf: float = 0.1
    fit: float = 0.05
    sheet_width: float = 1200.0
    sheet_height: float = 900.0
    spacing: float = 5.0

    # --- Joints ---
    min_joint_factor: float = 2.0  # shortest joint segment, in thicknesses
    right_angle_tolerance_deg: float = 1.0
    hinge_beam_width: float = 1.5
    hinge_gap: float = 0.5


settings = Settings()
