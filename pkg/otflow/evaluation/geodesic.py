"""
Geodesic Diagnostics - displacement interpolation and prefix-flow curves
"""

from typing import List, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigError, MeasureError
from ..dynamics.control import ControlSchedule
from ..dynamics.fields import FieldFamily
from ..dynamics.flow import flow_prefix_map
from ..transport.distance import w2_distance
from ..transport.measure import DiscreteMeasure, with_atoms
from .report import l2_map_error


def _check_time(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise ConfigError(f"Interpolation time must lie in [0, 1], got {t}")


def interpolated_pushforward(mu: DiscreteMeasure, phi_points: np.ndarray, t: float) -> DiscreteMeasure:
    """
    ((1 - t) Id + t Phi)_# mu

    Atoms move along straight lines towards their images; weights are unchanged.

    Raises:
        ConfigError: ``t`` outside [0, 1]
        MeasureError: Images not aligned with the atoms of ``mu``
    """
    _check_time(t)
    images = np.asarray(phi_points, dtype=float)
    if images.shape != mu.atoms.shape:
        raise MeasureError(f"Expected images of shape {mu.atoms.shape}, got {images.shape}")
    return with_atoms(mu, (1.0 - t) * mu.atoms + t * images)


def geodesic_deviation(
    mu: DiscreteMeasure, phi_points: np.ndarray, t_points: np.ndarray, t: float
) -> Tuple[float, float]:
    """
    Distance between the interpolations driven by Phi and by the exact map T

    Returns:
        (bound, actual) with bound = t ||Phi - T||_L2(mu) and actual the W2
        distance between the two interpolated measures; actual <= bound
    """
    _check_time(t)
    bound = t * l2_map_error(phi_points, t_points, mu.weights)
    actual = w2_distance(
        interpolated_pushforward(mu, phi_points, t),
        interpolated_pushforward(mu, t_points, t),
    )
    return bound, actual


def geodesic_curve(
    mu: DiscreteMeasure, phi_points: np.ndarray, t_points: np.ndarray, times: Sequence[float]
) -> List[Tuple[float, float, float]]:
    """Rows (t, bound, actual) of :func:`geodesic_deviation`"""
    return [(float(t), *geodesic_deviation(mu, phi_points, t_points, t)) for t in times]


def prefix_curve_deviation(
    field: FieldFamily,
    u: ControlSchedule,
    mu: DiscreteMeasure,
    t_points: np.ndarray,
    times: Sequence[float],
) -> List[Tuple[float, float]]:
    """
    W2 distance between the partial-flow pushforward and the exact geodesic

    For every t the partial flow Phi^(0, t) is evaluated at the nearest Euler node
    and compared with ((1 - t) Id + t T)_# mu. The curve t -> Phi^(0, t)_# mu is not
    a geodesic in general, so intermediate values are expected to be positive.
    """
    rows = []
    for t in times:
        prefix = with_atoms(mu, flow_prefix_map(field, u, mu.atoms, t))
        geodesic = interpolated_pushforward(mu, t_points, t)
        rows.append((float(t), w2_distance(prefix, geodesic)))
    return rows
