"""
Control Schedules - piecewise-constant controls on [0, 1]
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

from ..core.errors import ConfigError


@dataclass(frozen=True, eq=False)
class ControlSchedule:
    """
    Piecewise-constant control u(t) = u_l on [(l-1)/M, l/M)

    Attributes:
        values: Read-only (M, k) array, row ``l - 1`` holds ``u_l``
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2 or values.shape[0] == 0 or values.shape[1] == 0:
            raise ConfigError(f"Control values must be a non-empty (M, k) array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ConfigError("Control values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, M: int, k: int) -> "ControlSchedule":
        if M <= 0 or k <= 0:
            raise ConfigError("Step count and channel count must be positive")
        return cls(np.zeros((M, k)))

    @classmethod
    def constant(cls, M: int, value: Union[np.ndarray, list]) -> "ControlSchedule":
        row = np.asarray(value, dtype=float).ravel()
        return cls(np.tile(row, (M, 1)))

    @property
    def M(self) -> int:
        return int(self.values.shape[0])

    @property
    def k(self) -> int:
        return int(self.values.shape[1])

    @property
    def h(self) -> float:
        return 1.0 / self.M

    def l2_norm_squared(self) -> float:
        return float(np.sum(self.values * self.values) / self.M)

    def l2_norm(self) -> float:
        """sqrt((1/M) sum_l |u_l|^2)"""
        return float(np.sqrt(self.l2_norm_squared()))

    def with_values(self, values: np.ndarray) -> "ControlSchedule":
        return ControlSchedule(values)

    def to_dict(self) -> Dict[str, Any]:
        return {"M": self.M, "k": self.k, "values": self.values.tolist()}

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ControlSchedule":
        """
        Parse ``{"M": int, "k": int, "values": [[...] x M]}``

        Raises:
            ConfigError: Missing keys or values inconsistent with M and k
        """
        try:
            M, k, values = int(data["M"]), int(data["k"]), data["values"]
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid control record: {e}") from e
        array = np.asarray(values, dtype=float)
        if array.shape != (M, k):
            raise ConfigError(f"Control values have shape {array.shape}, expected ({M}, {k})")
        return cls(array)

    @classmethod
    def from_json(cls, text: str) -> "ControlSchedule":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Control file is not valid JSON: {e}") from e
        return cls.from_dict(data)

    def __repr__(self) -> str:
        return f"ControlSchedule(M={self.M}, k={self.k}, l2={self.l2_norm():.4g})"


def l2_norm(u: ControlSchedule) -> float:
    return u.l2_norm()
