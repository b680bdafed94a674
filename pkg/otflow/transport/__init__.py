"""
Transport Module - discrete measures, exact optimal couplings and W2 distances
"""

from .distance import transport_cost, w2_distance, w2_squared
from .measure import (
    DiscreteMeasure,
    PointMap,
    build_measure,
    pairwise_squared_costs,
    pushforward,
    squared_cost,
    with_atoms,
)
from .plan import CouplingPlan
from .simplex import SolverStats, TransportSolution, TransportationSimplex, solve_optimal_plan, solve_transport

__all__ = [
    "DiscreteMeasure",
    "PointMap",
    "CouplingPlan",
    "build_measure",
    "squared_cost",
    "pairwise_squared_costs",
    "pushforward",
    "with_atoms",
    "solve_optimal_plan",
    "solve_transport",
    "TransportationSimplex",
    "TransportSolution",
    "SolverStats",
    "transport_cost",
    "w2_distance",
    "w2_squared",
]
