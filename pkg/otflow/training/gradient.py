"""
Gradient Descent - adjoint-gradient alternative to the PMP trainer
"""

import time
from typing import List, Optional

import numpy as np

from ..core.errors import FlowBlowUpError, SingularCostateError
from ..core.status import TerminationReason, TrainingMethod
from ..dynamics.control import ControlSchedule
from ..dynamics.fields import FieldFamily
from ..transport.measure import DiscreteMeasure
from ..transport.plan import CouplingPlan
from ..utils.logger import get_logger
from .config import TrainerConfig
from .functional import cost_and_gradient, cost_functional
from .pmp import DEFAULT_STEPS, IterationRecord, TrainingResult, has_converged

logger = get_logger(__name__)


def gradient_descent_train(
    field: FieldFamily,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    config: TrainerConfig,
    u0: Optional[ControlSchedule] = None,
    steps: int = DEFAULT_STEPS,
) -> TrainingResult:
    """
    Minimize the discrete cost functional by steepest descent in L2

    The search direction is the L2 representative -grad / h of the exact gradient.
    A step s is accepted when the Armijo condition
    J(u - s grad / h) <= J(u) - c s |grad|^2 / h holds with strict decrease;
    otherwise s is multiplied by tau. ``config.rho0`` is the initial step and
    ``config.rho_min`` its floor.

    Returns:
        Training result; ``history[i].rho`` holds the step size tried
    """
    u = u0 if u0 is not None else ControlSchedule.zeros(steps, field.k)
    start = time.perf_counter()
    cost, grad = cost_and_gradient(field, u, mu, nu, plan, config.beta)
    initial_cost = cost
    logger.info(
        f"Gradient descent: N1={mu.size} N2={nu.size} M={u.M} k={field.k} "
        f"beta={config.beta:g} initial cost={initial_cost:.10g}"
    )

    history: List[IterationRecord] = []
    accepted_costs: List[float] = []
    step = config.rho0
    reason = TerminationReason.MAX_ITER

    if not np.any(grad):
        reason = TerminationReason.ZERO_GRADIENT
    else:
        for iteration in range(1, config.max_iter + 1):
            if step < config.rho_min:
                logger.info(f"Line search stalled: step={step:.3e} < rho_min={config.rho_min:.3e}")
                reason = TerminationReason.STALLED
                break

            squared_norm = float(np.sum(grad * grad)) / u.h
            try:
                values = u.values - step * grad / u.h
                if not np.all(np.isfinite(values)):
                    raise FlowBlowUpError(0)
                candidate = ControlSchedule(values)
                trial = cost_functional(field, candidate, mu, nu, plan, config.beta)
            except FlowBlowUpError as e:
                logger.warning(f"Iteration {iteration}: trial step blew up ({e}); shrinking step")
                trial = float("inf")

            accepted = trial < cost and trial <= cost - config.armijo_c * step * squared_norm
            history.append(IterationRecord(iteration=iteration, cost=trial, rho=step, accepted=accepted))
            logger.debug(
                f"Iteration {iteration}: cost={trial:.10g} step={step:.3e} "
                f"{'accepted' if accepted else 'rejected'}"
            )

            if not accepted:
                step *= config.tau
                continue

            try:
                new_cost, grad = cost_and_gradient(field, candidate, mu, nu, plan, config.beta)
            except SingularCostateError as e:
                logger.warning(f"Gradient recomputation failed ({e}); keeping the accepted control")
                u, cost = candidate, trial
                reason = TerminationReason.SINGULAR_COSTATE
                break
            u, cost = candidate, new_cost
            accepted_costs.append(cost)
            if config.rho_reset:
                step = config.rho0
            if has_converged(accepted_costs, config):
                reason = TerminationReason.CONVERGED
                break
            if not np.any(grad):
                reason = TerminationReason.ZERO_GRADIENT
                break

    wall_time = time.perf_counter() - start
    logger.info(
        f"Gradient descent finished ({reason}): cost={cost:.10g} "
        f"after {len(history)} iterations in {wall_time:.2f}s"
    )
    return TrainingResult(
        control=u,
        cost=cost,
        history=history,
        reason=reason,
        method=TrainingMethod.GRADIENT_DESCENT,
        wall_time=wall_time,
        initial_cost=initial_cost,
    )
