#!/usr/bin/env python3
"""
Logging setup shared by the CLI and the test suite
"""

import logging
from typing import Optional

from chodim.core.config import settings

_configured = False


def configure_logging(level: Optional[str] = None) -> None:
    """Configure the root logger once from settings"""
    global _configured
    if _configured and level is None:
        return
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=settings.LOG_FORMAT,
        force=True,
    )
    _configured = True
