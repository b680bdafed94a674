"""
Trainer Configuration - hyper-parameters of the PMP and gradient-descent trainers
"""

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List

from ..core.errors import ConfigError


@dataclass
class TrainerConfig:
    """
    Trainer configuration

    Attributes:
        beta: Weight of the (beta/2)||u||^2 regularizer
        rho0: Initial proximal penalty (initial step size for gradient descent)
        tau: Backtracking factor applied to rho on rejection
        max_iter: Outer iteration cap
        rho_min: Training stops as stalled once rho drops below this floor
        cost_tol: Relative cost decrease over ``window`` accepted iterations below
            which training is considered converged
        window: Number of accepted iterations in the convergence test
        rho_reset: Reset rho to rho0 after every accepted iteration
        armijo_c: Sufficient-decrease constant of the gradient-descent line search
    """

    beta: float = 5e-4
    rho0: float = 1.0
    tau: float = 0.5
    max_iter: int = 500
    rho_min: float = 1e-10
    cost_tol: float = 1e-9
    window: int = 10
    rho_reset: bool = False
    armijo_c: float = 1e-4

    def __post_init__(self) -> None:
        errors = self.validate()
        if errors:
            raise ConfigError("Invalid trainer configuration: " + "; ".join(errors))

    def validate(self) -> List[str]:
        """
        Validate configuration

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if not self.beta > 0:
            errors.append("beta must be positive")
        if not 0 < self.tau < 1:
            errors.append("tau must lie in (0, 1)")
        if not self.rho_min > 0:
            errors.append("rho_min must be positive")
        if not self.rho0 > self.rho_min:
            errors.append("rho0 must exceed rho_min")
        if self.max_iter < 0:
            errors.append("max_iter must be nonnegative")
        if self.cost_tol < 0:
            errors.append("cost_tol must be nonnegative")
        if self.window < 1:
            errors.append("window must be at least 1")
        if not 0 < self.armijo_c < 1:
            errors.append("armijo_c must lie in (0, 1)")
        return errors

    def replace(self, **changes: Any) -> "TrainerConfig":
        data = self.to_dict()
        data.update(changes)
        return TrainerConfig.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown trainer settings: {', '.join(sorted(unknown))}")
        return cls(**data)

    def __repr__(self) -> str:
        return f"TrainerConfig(beta={self.beta:g}, rho0={self.rho0:g}, tau={self.tau:g}, max_iter={self.max_iter})"
