"""
Flow Integration - explicit Euler forward flow and implicit Euler costates

All integrators work on batches: atoms are stacked along axis 1 of an
(M + 1, N, n) state array and advanced together, one Euler step at a time.
"""

from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from ..core.errors import ConfigError, FlowBlowUpError, SingularCostateError
from ..utils.logger import get_logger
from .control import ControlSchedule
from .fields import FieldFamily

logger = get_logger(__name__)

Points = Union[np.ndarray, Sequence[Sequence[float]]]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Euler states z^0, ..., z^M of one atom

    Attributes:
        states: Read-only (M + 1, n) array; ``states[0]`` is the initial datum
    """

    states: np.ndarray

    def __post_init__(self) -> None:
        states = np.array(self.states, dtype=float, copy=True)
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def terminal(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self) -> int:
        return int(self.states.shape[0])


def _check_compatible(field: FieldFamily, u: ControlSchedule) -> None:
    if field.k != u.k:
        raise ConfigError(f"Field family has {field.k} channels but control has {u.k}")


def _as_points(field: FieldFamily, points: Points) -> np.ndarray:
    x = np.array(points, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != field.dim:
        raise ConfigError(f"Expected points of dimension {field.dim}, got shape {x.shape}")
    return x


def euler_step(field: FieldFamily, z: np.ndarray, u_l: np.ndarray, h: float) -> np.ndarray:
    """z + h F(z) u_l for a batch of states"""
    with np.errstate(over="ignore", invalid="ignore"):
        return z + h * field.velocity(z, u_l)


def check_finite(z: np.ndarray, step: int) -> None:
    """
    Raises:
        FlowBlowUpError: Some row of ``z`` is not finite
    """
    finite = np.all(np.isfinite(z), axis=-1)
    if not np.all(finite):
        atom = int(np.argmin(finite))
        raise FlowBlowUpError(step, atom)


def integrate(field: FieldFamily, u: ControlSchedule, points: Points) -> np.ndarray:
    """
    Drive all points simultaneously with the explicit Euler scheme

    Args:
        field: Controlled vector fields
        u: Piecewise-constant control
        points: (N, n) initial data

    Returns:
        (M + 1, N, n) array of states

    Raises:
        FlowBlowUpError: Non-finite state; carries the step and atom index
    """
    _check_compatible(field, u)
    return _euler_states(field, u.values, u.h, _as_points(field, points))


def _euler_states(field: FieldFamily, values: np.ndarray, h: float, x: np.ndarray) -> np.ndarray:
    states = np.empty((values.shape[0] + 1, x.shape[0], field.dim))
    states[0] = x
    if x.shape[0] == 0:
        states[:] = x
        return states
    for l in range(1, values.shape[0] + 1):
        states[l] = euler_step(field, states[l - 1], values[l - 1], h)
        check_finite(states[l], l)
    return states


def terminal_states(field: FieldFamily, u: ControlSchedule, points: Points) -> np.ndarray:
    """Phi_u applied to every point, shape (N, n)"""
    return integrate(field, u, points)[-1]


def flow_forward(field: FieldFamily, u: ControlSchedule, x0: Sequence[float]) -> Trajectory:
    """
    Explicit Euler trajectory z^{l+1} = z^l + (1/M) F(z^l) u_l from ``x0``

    Raises:
        ConfigError: Incompatible field, control or point dimension
        FlowBlowUpError: Non-finite state
    """
    x = np.asarray(x0, dtype=float).ravel()
    states = integrate(field, u, x.reshape(1, -1))
    return Trajectory(states[:, 0, :])


def flow_map(field: FieldFamily, u: ControlSchedule, points: Points) -> List[Trajectory]:
    """Trajectories of every point, order preserved"""
    if len(points) == 0:
        return []
    states = integrate(field, u, points)
    return [Trajectory(states[:, i, :]) for i in range(states.shape[1])]


def flow_prefix_map(field: FieldFamily, u: ControlSchedule, points: Points, t: float) -> np.ndarray:
    """
    Partial flow Phi_u^{(0, t)} evaluated on the Euler grid

    Args:
        t: Time in [0, 1], rounded to the nearest grid node ``l = round(t M)``

    Returns:
        (N, n) states z^l

    Raises:
        ConfigError: ``t`` outside [0, 1]
    """
    if not 0.0 <= t <= 1.0:
        raise ConfigError(f"Prefix time must lie in [0, 1], got {t}")
    _check_compatible(field, u)
    node = int(round(t * u.M))
    x = _as_points(field, points)
    return _euler_states(field, u.values[:node], u.h, x)[-1]


def costates(field: FieldFamily, u: ControlSchedule, states: np.ndarray, lambda_M: np.ndarray) -> np.ndarray:
    """
    Implicit Euler costate recursion for a batch of trajectories

    Each backward step solves lambda^{l-1} (I - h A_l) = lambda^l with
    A_l = d(F(z^{l-1}) u_l)/dz.

    Args:
        states: (M + 1, N, n) forward states
        lambda_M: (N, n) terminal covectors

    Returns:
        (M + 1, N, n) covectors lambda^0, ..., lambda^M

    Raises:
        SingularCostateError: Some I - h A_l is singular
    """
    _check_compatible(field, u)
    M, h = u.M, u.h
    n_atoms, n = states.shape[1], states.shape[2]
    lam = np.empty((M + 1, n_atoms, n))
    lam[M] = lambda_M
    if n_atoms == 0:
        return lam
    identity = np.eye(n)[None, :, :]
    for l in range(M, 0, -1):
        A = field.jacobian(states[l - 1], u.values[l - 1])
        system = np.transpose(identity - h * A, (0, 2, 1))
        try:
            lam[l - 1] = np.linalg.solve(system, lam[l][:, :, None])[:, :, 0]
        except np.linalg.LinAlgError as e:
            raise SingularCostateError(l) from e
        if not np.all(np.isfinite(lam[l - 1])):
            raise SingularCostateError(l)
    return lam


def costate_backward(field: FieldFamily, u: ControlSchedule, traj: Trajectory,
                     lambda_M: Sequence[float]) -> List[np.ndarray]:
    """Covectors lambda^0, ..., lambda^M along one trajectory"""
    if len(traj) != u.M + 1:
        raise ConfigError(f"Trajectory has {len(traj)} states, control expects {u.M + 1}")
    lam_M = np.asarray(lambda_M, dtype=float).reshape(1, -1)
    lam = costates(field, u, traj.states[:, None, :], lam_M)
    return [lam[l, 0].copy() for l in range(u.M + 1)]
