"""
Exception hierarchy shared by all otflow modules
"""

from typing import Optional


class OTFlowError(Exception):
    """Base class of every error raised by otflow"""


class MeasureError(OTFlowError, ValueError):
    """Invalid measure, plan or point data"""


class ConfigError(OTFlowError, ValueError):
    """Invalid trainer or experiment configuration"""


class FlowBlowUpError(OTFlowError, ArithmeticError):
    """
    A trajectory left the finite range during explicit Euler integration

    Attributes:
        step: Euler step (1-based) whose result was non-finite
        atom: index of the offending atom, when known
    """

    def __init__(self, step: int, atom: Optional[int] = None):
        self.step = step
        self.atom = atom
        where = f" (atom {atom})" if atom is not None else ""
        super().__init__(f"Non-finite state after Euler step {step}{where}")


class SingularCostateError(OTFlowError, ArithmeticError):
    """The implicit Euler costate matrix I - h*A_l is singular"""

    def __init__(self, step: int):
        self.step = step
        super().__init__(
            f"Singular implicit Euler system at costate step {step}; "
            "the step size is too large for the control magnitude"
        )


class TrainingStalled(OTFlowError):
    """The proximal penalty (or line-search step) dropped below its floor"""

    def __init__(self, rho: float, rho_min: float):
        self.rho = rho
        self.rho_min = rho_min
        super().__init__(f"Training stalled: rho={rho:.3e} < rho_min={rho_min:.3e}")


class StageError(OTFlowError):
    """An experiment stage failed; wraps the original exception"""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"Stage '{stage}' failed: {cause}")
