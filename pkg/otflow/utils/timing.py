"""
Stage Timing - wall-clock bookkeeping for experiment pipelines

Collects per-stage durations and success flags so run records can report where
time went (sampling, OT solve, training, evaluation, plotting).
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List


@dataclass
class StageMetrics:
    """Timing of a single named stage"""
    name: str
    duration: float = 0.0
    success: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "duration": self.duration, "success": self.success}


@dataclass
class StageTimer:
    """
    Stage timer

    Use :meth:`stage` as a context manager around each pipeline stage; failed
    stages are recorded with ``success=False`` before the exception propagates.
    """

    stages: List[StageMetrics] = field(default_factory=list)
    _started: float = field(default_factory=time.perf_counter)

    @contextmanager
    def stage(self, name: str) -> Iterator[StageMetrics]:
        metrics = StageMetrics(name=name)
        self.stages.append(metrics)
        start = time.perf_counter()
        try:
            yield metrics
            metrics.success = True
        finally:
            metrics.duration = time.perf_counter() - start

    @property
    def total_time(self) -> float:
        return time.perf_counter() - self._started

    def get_report(self) -> Dict[str, Any]:
        """Get stage durations as a JSON-ready dictionary"""
        return {
            "total_time": self.total_time,
            "stages": [stage.to_dict() for stage in self.stages],
        }
