"""
Evaluation module - post-training diagnostics
"""

from .geodesic import geodesic_curve, geodesic_deviation, interpolated_pushforward, prefix_curve_deviation
from .report import EvalReport, evaluate, l2_map_error, map_images

__all__ = [
    "EvalReport",
    "evaluate",
    "geodesic_curve",
    "geodesic_deviation",
    "interpolated_pushforward",
    "l2_map_error",
    "map_images",
    "prefix_curve_deviation",
]
