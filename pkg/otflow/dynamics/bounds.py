"""
A-priori bounds on flows generated by controls of bounded L2 norm
"""

import math

from ..core.errors import ConfigError
from .fields import FieldFamily


def growth_bound(field: FieldFamily, r: float, rho: float) -> float:
    """
    Radius R with |Phi_u(x)| <= R whenever |x| <= r and ||u||_L2 <= rho

    R = (r + C sqrt(k) rho) exp(sqrt(k) rho)

    Returns ``inf`` when the exponential overflows.
    """
    if r < 0 or rho < 0:
        raise ConfigError("Radius and control budget must be nonnegative")
    scale = math.sqrt(field.k) * rho
    try:
        return (r + field.growth_constant * scale) * math.exp(scale)
    except OverflowError:
        return math.inf


def lipschitz_bound(field: FieldFamily, rho: float) -> float:
    """Lipschitz constant exp(L sqrt(k) rho) of Phi_u for ||u||_L2 <= rho"""
    if rho < 0:
        raise ConfigError("Control budget must be nonnegative")
    try:
        return math.exp(field.lipschitz_constant * math.sqrt(field.k) * rho)
    except OverflowError:
        return math.inf
