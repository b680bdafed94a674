"""
Utility Module - Logging and timing helpers
"""

from .logger import (
    ColorCode,
    ColoredFormatter,
    LevelColor,
    LoggerConfig,
    OTFlowLogger,
    configure_logging,
    get_logger,
    get_otflow_logger,
)
from .timing import StageMetrics, StageTimer

__all__ = [
    "OTFlowLogger",
    "get_logger",
    "get_otflow_logger",
    "configure_logging",
    "LoggerConfig",
    "ColorCode",
    "LevelColor",
    "ColoredFormatter",
    "StageMetrics",
    "StageTimer",
]
