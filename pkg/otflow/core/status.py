"""
Status enumerations - termination reasons and training methods
"""

from enum import Enum, IntEnum


class TerminationReason(IntEnum):
    """
    Reason a training loop stopped

    - MAX_ITER: the outer iteration cap was reached
    - STALLED: the proximal penalty (or step size) fell below its floor
    - CONVERGED: the relative cost decrease over the acceptance window dropped below tolerance
    - ZERO_GRADIENT: the starting control is already stationary
    - SINGULAR_COSTATE: the backward costate system became singular; the best control so far is kept
    """

    MAX_ITER = 0
    STALLED = 1
    CONVERGED = 2
    ZERO_GRADIENT = 3
    SINGULAR_COSTATE = 4

    def __str__(self) -> str:
        return self.name.lower()

    def __repr__(self) -> str:
        return f"TerminationReason.{self.name}"


class TrainingMethod(str, Enum):
    """Optimizer used to minimize the discrete cost functional"""

    PMP = "pmp"
    GRADIENT_DESCENT = "gd"

    def __str__(self) -> str:
        return self.value
