"""
Transport Costs - plan costs and the 2-Wasserstein distance
"""

import math

import numpy as np

from ..core.errors import MeasureError
from .measure import DiscreteMeasure
from .plan import CouplingPlan
from .simplex import solve_transport


def transport_cost(plan: CouplingPlan, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """
    Cost sum m * |x_i - y_j|^2 of a plan between ``mu`` and ``nu``

    Raises:
        MeasureError: Plan index ranges do not match the measures
    """
    if plan.n1 != mu.size or plan.n2 != nu.size:
        raise MeasureError(
            f"Plan of shape ({plan.n1}, {plan.n2}) does not match measures of sizes ({mu.size}, {nu.size})"
        )
    if mu.dim != nu.dim:
        raise MeasureError(f"Dimension mismatch: source {mu.dim} vs target {nu.dim}")
    diff = mu.atoms[plan.rows] - nu.atoms[plan.cols]
    return float(plan.masses @ np.einsum("ij,ij->i", diff, diff))


def w2_squared(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Optimal transport cost W2^2(mu, nu)"""
    return solve_transport(mu, nu).cost


def w2_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """
    2-Wasserstein distance between two discrete measures

    Identical measures short-circuit to exactly zero.
    """
    if mu.same_as(nu):
        return 0.0
    return math.sqrt(max(w2_squared(mu, nu), 0.0))
