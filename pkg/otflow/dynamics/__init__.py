"""
Dynamics module - linear-control systems, their flows and a-priori bounds
"""

from .bounds import growth_bound, lipschitz_bound
from .control import ControlSchedule, l2_norm
from .fields import (
    FieldFamily,
    MonomialChannel,
    channel_constants,
    custom_family,
    gaussian_monomial_bounds,
    hermite2d,
    hermite_nd,
    linear,
    translations,
)
from .flow import (
    Trajectory,
    costate_backward,
    costates,
    flow_forward,
    flow_map,
    flow_prefix_map,
    integrate,
    terminal_states,
)

__all__ = [
    "ControlSchedule",
    "FieldFamily",
    "MonomialChannel",
    "Trajectory",
    "channel_constants",
    "costate_backward",
    "costates",
    "custom_family",
    "flow_forward",
    "flow_map",
    "flow_prefix_map",
    "gaussian_monomial_bounds",
    "growth_bound",
    "hermite2d",
    "hermite_nd",
    "integrate",
    "l2_norm",
    "linear",
    "lipschitz_bound",
    "terminal_states",
    "translations",
]
