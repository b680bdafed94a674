"""
Evaluation Reports - pushforward error, coupling cost and error decomposition

The decomposition bounds the continuous error by three computable terms,

    W2(Phi_# mu, nu) <= L_beta W2(mu, mu_N) + 2 sqrt(coupling cost) + W2(nu_N, nu),

where the continuous mu and nu are stood in for by finer reference measures and
L_beta is the a-priori Lipschitz bound of the trained flow.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import MeasureError
from ..dynamics.bounds import lipschitz_bound
from ..dynamics.control import ControlSchedule
from ..dynamics.fields import FieldFamily
from ..dynamics.flow import terminal_states
from ..training.functional import check_plan_matches, terminal_cost
from ..transport.distance import w2_distance
from ..transport.measure import DiscreteMeasure, PointMap, with_atoms
from ..transport.plan import CouplingPlan
from ..utils.logger import get_logger

logger = get_logger(__name__)


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


@dataclass
class EvalReport:
    """
    Post-training diagnostics

    Attributes:
        w2_push_vs_target: W2 between the pushforward of mu_N and nu_N
        coupling_cost: Plan-weighted terminal cost; also the kappa proxy
        control_norm: L2 norm of the control
        lipschitz_bound: A-priori Lipschitz bound of the flow at that norm
        l2_map_error: L2(mu_N) distance to the exact map, when known
        decomposition: (L_beta W2(mu_ref, mu_N), 2 sqrt(coupling_cost), W2(nu_N, nu_ref))
        reference_error: W2 between the pushforward of mu_ref and nu_ref
    """

    w2_push_vs_target: float
    coupling_cost: float
    control_norm: float
    lipschitz_bound: float
    l2_map_error: Optional[float] = None
    decomposition: Optional[Tuple[float, float, float]] = None
    reference_error: Optional[float] = None

    @property
    def kappa_proxy(self) -> float:
        return self.coupling_cost

    @property
    def decomposition_bound(self) -> Optional[float]:
        return sum(self.decomposition) if self.decomposition is not None else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w2_push_vs_target": self.w2_push_vs_target,
            "coupling_cost": self.coupling_cost,
            "kappa_proxy": self.kappa_proxy,
            "control_norm": self.control_norm,
            "lipschitz_bound": _finite_or_none(self.lipschitz_bound),
            "l2_map_error": self.l2_map_error,
            "decomposition": [_finite_or_none(term) for term in self.decomposition] if self.decomposition else None,
            "reference_error": self.reference_error,
        }


def l2_map_error(phi_points: np.ndarray, t_points: np.ndarray, weights: Sequence[float]) -> float:
    """
    sqrt(sum_i w_i |Phi(x_i) - T(x_i)|^2)

    Raises:
        MeasureError: Lists of different lengths
    """
    phi = np.atleast_2d(np.asarray(phi_points, dtype=float))
    exact = np.atleast_2d(np.asarray(t_points, dtype=float))
    w = np.asarray(weights, dtype=float).ravel()
    if phi.shape != exact.shape or phi.shape[0] != w.shape[0]:
        raise MeasureError(
            f"Misaligned inputs: {phi.shape[0]} flow images, {exact.shape[0]} exact images, {w.shape[0]} weights"
        )
    diff = phi - exact
    return float(np.sqrt(w @ np.einsum("ij,ij->i", diff, diff)))


def map_images(point_map: PointMap, points: np.ndarray) -> np.ndarray:
    return np.array([np.asarray(point_map(x.copy()), dtype=float).ravel() for x in points])


def evaluate(
    field: FieldFamily,
    u: ControlSchedule,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    exact_map: Optional[PointMap] = None,
    mu_ref: Optional[DiscreteMeasure] = None,
    nu_ref: Optional[DiscreteMeasure] = None,
) -> EvalReport:
    """
    Evaluate a trained control

    Args:
        field: Controlled vector fields
        u: Trained control
        mu: Source measure mu_N
        nu: Target measure nu_N
        plan: Coupling used for training
        exact_map: Exact transport map T, if known
        mu_ref: Finer stand-in for the continuous source
        nu_ref: Finer stand-in for the continuous target

    Returns:
        EvalReport; the decomposition is filled only when both references are given
    """
    check_plan_matches(plan, mu, nu)
    z_final = terminal_states(field, u, mu.atoms)
    pushed = with_atoms(mu, z_final)

    coupling = terminal_cost(z_final, nu, plan)
    norm = u.l2_norm()
    lip = lipschitz_bound(field, norm)
    report = EvalReport(
        w2_push_vs_target=w2_distance(pushed, nu),
        coupling_cost=coupling,
        control_norm=norm,
        lipschitz_bound=lip,
    )

    if exact_map is not None:
        report.l2_map_error = l2_map_error(z_final, map_images(exact_map, mu.atoms), mu.weights)

    if mu_ref is not None and nu_ref is not None:
        source_gap = w2_distance(mu_ref, mu)
        target_gap = w2_distance(nu, nu_ref)
        scaled = lip * source_gap if source_gap > 0 else 0.0
        report.decomposition = (scaled, 2.0 * math.sqrt(coupling), target_gap)
        pushed_ref = with_atoms(mu_ref, terminal_states(field, u, mu_ref.atoms))
        report.reference_error = w2_distance(pushed_ref, nu_ref)

    logger.info(
        f"Evaluation: W2(push, target)={report.w2_push_vs_target:.6g} "
        f"coupling cost={coupling:.6g} |u|={norm:.4g}"
    )
    return report
