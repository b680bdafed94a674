"""
Iterative Maximum Principle - PMP-based training of linear-control flows

Each outer iteration recomputes covectors (only after an accepted step), sweeps the
time grid once maximizing the augmented Hamiltonian with the covector correction
applied along the new trajectories, and accepts the trial control only if the
cost strictly decreases. Rejections shrink the proximal penalty rho by tau.
"""

import math
import time
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import ConfigError, FlowBlowUpError, SingularCostateError, TrainingStalled
from ..core.status import TerminationReason, TrainingMethod
from ..dynamics.control import ControlSchedule
from ..dynamics.fields import FieldFamily
from ..dynamics.flow import check_finite, costates, euler_step, integrate
from ..transport.measure import DiscreteMeasure
from ..transport.plan import CouplingPlan
from ..utils.logger import get_logger
from .config import TrainerConfig
from .functional import (
    check_plan_matches,
    corrected_covectors,
    hamiltonian_coefficients,
    maximize_augmented_hamiltonian,
    terminal_cost,
    terminal_covectors,
)

logger = get_logger(__name__)

DEFAULT_STEPS = 32


@dataclass(frozen=True)
class IterationRecord:
    """One outer iteration: trial cost, penalty used and whether it was accepted"""

    iteration: int
    cost: float
    rho: float
    accepted: bool

    def to_dict(self) -> Dict[str, Any]:
        cost = self.cost if math.isfinite(self.cost) else None
        return {"iteration": self.iteration, "cost": cost, "rho": self.rho, "accepted": self.accepted}


@dataclass(frozen=True, eq=False)
class TrainerState:
    """
    State carried between PMP iterations

    Attributes:
        u: Current control
        states: (M + 1, N1, n) Euler states of every source atom under ``u``
        covectors: (M + 1, N1, n) covectors, ``None`` until first computed
        cost: Cost of ``u``
        rho: Current proximal penalty
        flag: Whether covectors must be recomputed before the next sweep
        history: Records of all iterations so far
    """

    u: ControlSchedule
    states: np.ndarray
    covectors: Optional[np.ndarray]
    cost: float
    rho: float
    flag: bool = True
    history: List[IterationRecord] = dataclass_field(default_factory=list)

    @property
    def iteration(self) -> int:
        return len(self.history)


@dataclass
class TrainingResult:
    """
    Outcome of a training run

    Attributes:
        control: Best control seen
        cost: Cost of ``control``
        history: Per-iteration records
        reason: Why the loop stopped
        method: Optimizer used
        wall_time: Seconds spent in the loop
        initial_cost: Cost of the starting control
    """

    control: ControlSchedule
    cost: float
    history: List[IterationRecord]
    reason: TerminationReason
    method: TrainingMethod
    wall_time: float
    initial_cost: float

    @property
    def iterations(self) -> int:
        return len(self.history)

    @property
    def accepted(self) -> int:
        return sum(1 for record in self.history if record.accepted)

    def accepted_costs(self) -> List[float]:
        return [record.cost for record in self.history if record.accepted]

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "method": str(self.method),
            "termination_reason": str(self.reason),
            "initial_cost": self.initial_cost,
            "final_cost": self.cost,
            "iterations": self.iterations,
            "accepted": self.accepted,
        }
        if include_timing:
            record["wall_time"] = self.wall_time
        record["history"] = [entry.to_dict() for entry in self.history]
        return record

    def __repr__(self) -> str:
        return (
            f"TrainingResult(method={self.method}, cost={self.cost:.6g}, "
            f"iterations={self.iterations}, reason={self.reason})"
        )


def has_converged(accepted_costs: List[float], config: TrainerConfig) -> bool:
    """Relative decrease over the last ``window`` accepted iterations is below ``cost_tol``"""
    if len(accepted_costs) <= config.window:
        return False
    before, now = accepted_costs[-config.window - 1], accepted_costs[-1]
    scale = max(abs(before), np.finfo(float).tiny)
    return (before - now) / scale < config.cost_tol


def initial_state(
    field: FieldFamily,
    u0: ControlSchedule,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    config: TrainerConfig,
) -> TrainerState:
    """Trajectories and cost of the starting control"""
    check_plan_matches(plan, mu, nu)
    if u0.k != field.k:
        raise ConfigError(f"Initial control has {u0.k} channels, field family has {field.k}")
    states = integrate(field, u0, mu.atoms)
    cost = terminal_cost(states[-1], nu, plan) + 0.5 * config.beta * u0.l2_norm_squared()
    return TrainerState(u=u0, states=states, covectors=None, cost=cost, rho=config.rho0)


def _sweep(
    field: FieldFamily,
    state: TrainerState,
    covectors: np.ndarray,
    row_mass: np.ndarray,
    config: TrainerConfig,
) -> Tuple[np.ndarray, np.ndarray]:
    u, h = state.u, state.u.h
    new_values = np.empty_like(u.values)
    new_states = np.empty_like(state.states)
    new_states[0] = state.states[0]
    lam = covectors[0]
    for l in range(1, u.M + 1):
        a = hamiltonian_coefficients(field, lam, new_states[l - 1])
        new_values[l - 1] = maximize_augmented_hamiltonian(a, u.values[l - 1], config.beta, state.rho)
        new_states[l] = euler_step(field, new_states[l - 1], new_values[l - 1], h)
        check_finite(new_states[l], l)
        lam = corrected_covectors(covectors[l], state.states[l], new_states[l], row_mass)
    return new_values, new_states


def pmp_iteration(
    state: TrainerState,
    field: FieldFamily,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    config: TrainerConfig,
) -> TrainerState:
    """
    One outer iteration of the Iterative Maximum Principle

    Returns:
        New state; on rejection only ``rho``, ``flag`` and ``history`` differ

    Raises:
        TrainingStalled: ``rho`` is already below ``config.rho_min``
        SingularCostateError: Covector recomputation failed
    """
    if state.rho < config.rho_min:
        raise TrainingStalled(state.rho, config.rho_min)

    covectors = state.covectors
    if state.flag or covectors is None:
        covectors = costates(field, state.u, state.states, terminal_covectors(state.states[-1], nu, plan))

    iteration = state.iteration + 1
    try:
        new_values, new_states = _sweep(field, state, covectors, plan.row_marginal, config)
        if not np.all(np.isfinite(new_values)):
            raise FlowBlowUpError(0)
        new_u = ControlSchedule(new_values)
        new_cost = terminal_cost(new_states[-1], nu, plan) + 0.5 * config.beta * new_u.l2_norm_squared()
    except FlowBlowUpError as e:
        logger.warning(f"Iteration {iteration}: trial sweep blew up ({e}); backtracking")
        new_cost = float("inf")

    accepted = bool(new_cost < state.cost)
    record = IterationRecord(iteration=iteration, cost=new_cost, rho=state.rho, accepted=accepted)
    history = state.history + [record]
    logger.debug(
        f"Iteration {iteration}: cost={new_cost:.10g} rho={state.rho:.3e} "
        f"{'accepted' if accepted else 'rejected'}"
    )

    if accepted:
        return TrainerState(
            u=new_u,
            states=new_states,
            covectors=None,
            cost=new_cost,
            rho=config.rho0 if config.rho_reset else state.rho,
            flag=True,
            history=history,
        )
    return replace(state, covectors=covectors, rho=config.tau * state.rho, flag=False, history=history)


def train(
    field: FieldFamily,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    config: TrainerConfig,
    u0: Optional[ControlSchedule] = None,
    steps: int = DEFAULT_STEPS,
) -> TrainingResult:
    """
    Minimize the discrete cost functional with the Iterative Maximum Principle

    Args:
        field: Controlled vector fields
        mu: Source measure
        nu: Target measure
        plan: Coupling between ``mu`` and ``nu``, usually optimal
        config: Trainer configuration
        u0: Starting control; the zero control with ``steps`` sub-intervals if omitted
        steps: Number of Euler sub-intervals M of the default starting control

    Returns:
        Training result holding the best control seen
    """
    u0 = u0 if u0 is not None else ControlSchedule.zeros(steps, field.k)
    start = time.perf_counter()
    state = initial_state(field, u0, mu, nu, plan, config)
    initial_cost = state.cost
    logger.info(
        f"PMP training: N1={mu.size} N2={nu.size} M={u0.M} k={field.k} "
        f"beta={config.beta:g} initial cost={initial_cost:.10g}"
    )

    reason = TerminationReason.MAX_ITER
    accepted_costs: List[float] = []
    for _ in range(config.max_iter):
        try:
            state = pmp_iteration(state, field, mu, nu, plan, config)
        except TrainingStalled as e:
            logger.info(str(e))
            reason = TerminationReason.STALLED
            break
        except SingularCostateError as e:
            logger.warning(f"Covector recomputation failed ({e}); keeping the last accepted control")
            reason = TerminationReason.SINGULAR_COSTATE
            break
        if state.history[-1].accepted:
            accepted_costs.append(state.cost)
            if has_converged(accepted_costs, config):
                reason = TerminationReason.CONVERGED
                break

    wall_time = time.perf_counter() - start
    logger.info(
        f"PMP training finished ({reason}): cost={state.cost:.10g} "
        f"after {len(state.history)} iterations in {wall_time:.2f}s"
    )
    return TrainingResult(
        control=state.u,
        cost=state.cost,
        history=state.history,
        reason=reason,
        method=TrainingMethod.PMP,
        wall_time=wall_time,
        initial_cost=initial_cost,
    )
