#!/usr/bin/env python3
"""
Centralized process settings for chodim
"""

import os
import logging
from typing import Dict, Any
from dotenv import load_dotenv

from chodim import __version__
from chodim.core.exceptions import ConfigurationError

# Load environment variables
load_dotenv()


class Settings:
    """Centralized application settings"""

    APP_NAME: str = "chodim"
    APP_VERSION: str = __version__
    REPORT_SCHEMA_VERSION: str = "1"

    # Execution
    THREADS: int = int(os.getenv("CHODIM_THREADS", str(os.cpu_count() or 1)))
    SERIAL: bool = os.getenv("CHODIM_SERIAL", "false").lower() == "true"

    # Output
    OUTPUT_DIR: str = os.getenv("CHODIM_OUTPUT_DIR", "runs")

    # Logging Configuration
    LOG_LEVEL: str = os.getenv("CHODIM_LOG_LEVEL", "INFO")
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    @classmethod
    def validate_required_settings(cls) -> None:
        """Validate that all settings hold usable values"""
        problems = {}
        if cls.THREADS < 1:
            problems["CHODIM_THREADS"] = f"must be >= 1, got {cls.THREADS}"
        if logging.getLevelName(cls.LOG_LEVEL.upper()) not in (
            logging.DEBUG, logging.INFO, logging.WARNING, logging.ERROR, logging.CRITICAL
        ):
            problems["CHODIM_LOG_LEVEL"] = f"unknown level '{cls.LOG_LEVEL}'"

        if problems:
            raise ConfigurationError(
                "Invalid settings:\n" + "\n".join(f"{k}: {v}" for k, v in problems.items()),
                field_errors=problems,
            )

    @classmethod
    def get_all_settings(cls) -> Dict[str, Any]:
        """Get all settings as a dictionary"""
        return {
            "app_name": cls.APP_NAME,
            "app_version": cls.APP_VERSION,
            "report_schema_version": cls.REPORT_SCHEMA_VERSION,
            "threads": cls.THREADS,
            "serial": cls.SERIAL,
            "output_dir": cls.OUTPUT_DIR,
            "log_level": cls.LOG_LEVEL,
        }


# Global settings instance
settings = Settings()

# Validate settings on import
settings.validate_required_settings()
