"""
Core module - Status enumerations and the exception hierarchy
"""

from .errors import (
    ConfigError,
    FlowBlowUpError,
    MeasureError,
    OTFlowError,
    SingularCostateError,
    StageError,
    TrainingStalled,
)
from .status import TerminationReason, TrainingMethod

__all__ = [
    "TerminationReason",
    "TrainingMethod",
    "OTFlowError",
    "MeasureError",
    "ConfigError",
    "FlowBlowUpError",
    "SingularCostateError",
    "TrainingStalled",
    "StageError",
]
