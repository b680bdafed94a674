"""
Training module - cost functional, PMP trainer and gradient descent
"""

from .config import TrainerConfig
from .functional import (
    adjoint_gradient,
    corrected_covector,
    corrected_covectors,
    cost_and_gradient,
    cost_functional,
    hamiltonian_coefficients,
    maximize_augmented_hamiltonian,
    minimizer_norm_bound,
    terminal_cost,
    terminal_covector,
    terminal_covectors,
)
from .gradient import gradient_descent_train
from .pmp import (
    IterationRecord,
    TrainerState,
    TrainingResult,
    has_converged,
    initial_state,
    pmp_iteration,
    train,
)

__all__ = [
    "IterationRecord",
    "TrainerConfig",
    "TrainerState",
    "TrainingResult",
    "adjoint_gradient",
    "corrected_covector",
    "corrected_covectors",
    "cost_and_gradient",
    "cost_functional",
    "gradient_descent_train",
    "hamiltonian_coefficients",
    "has_converged",
    "initial_state",
    "maximize_augmented_hamiltonian",
    "minimizer_norm_bound",
    "pmp_iteration",
    "terminal_cost",
    "terminal_covector",
    "terminal_covectors",
    "train",
]
