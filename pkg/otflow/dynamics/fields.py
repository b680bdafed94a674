"""
Field Families - controlled vector fields F_1, ..., F_k of a linear-control system

Every built-in family is a list of channels. A channel is the vector field

    F_c(x) = g(x)^w * x^alpha * e_i,     g(x) = exp(-|x|^2 / (2 zeta)),

that is, a monomial ``x^alpha`` (optionally weighted by the Gaussian ``g``) acting on
the single output coordinate ``i``. Lipschitz and growth constants are computed in
closed form from the degree of each monomial when the family is built.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigError


@dataclass(frozen=True)
class MonomialChannel:
    """
    One controlled vector field

    Attributes:
        output: Coordinate index the field points along
        exponents: Monomial exponents, one per coordinate
        gaussian: Whether the monomial is weighted by exp(-|x|^2 / (2 zeta))
    """

    output: int
    exponents: Tuple[int, ...]
    gaussian: bool = False

    @property
    def degree(self) -> int:
        return int(sum(self.exponents))


def gaussian_monomial_bounds(degree: int, zeta: float) -> Tuple[float, float]:
    """
    Closed-form suprema over R^n for a Gaussian-weighted monomial of given degree

    With r = |x|, |x^alpha| <= r^d and |grad x^alpha| <= d r^(d-1), so

        sup |phi|      <= sup_r r^d e^{-r^2/(2 zeta)}                   at r^2 = d zeta
        sup |grad phi| <= sup_r (d r^(d-1) + r^(d+1)/zeta) e^{-r^2/(2 zeta)}

    and the second supremum is attained at r^2 = s zeta with s^2 - s - d(d-1) = 0.

    Returns:
        (value bound, gradient bound)
    """
    if degree < 0 or zeta <= 0:
        raise ConfigError("Degree must be nonnegative and zeta positive")
    d = degree
    value = 1.0 if d == 0 else (d * zeta / math.e) ** (d / 2.0)

    s = (1.0 + math.sqrt(1.0 + 4.0 * d * (d - 1))) / 2.0
    r = math.sqrt(s * zeta)
    lead = d * r ** (d - 1) if d > 0 else 0.0
    gradient = (lead + r ** (d + 1) / zeta) * math.exp(-r * r / (2.0 * zeta))
    return value, gradient


def channel_constants(channel: MonomialChannel, zeta: float) -> Tuple[float, float]:
    """
    Lipschitz constant L and growth constant C of a single channel

    Returns:
        (L, C) with |F(x) - F(y)| <= L |x - y| and |F(x)| <= C (1 + |x|)

    Raises:
        ConfigError: Unweighted monomials of degree >= 2 are not globally Lipschitz
    """
    d = channel.degree
    if not channel.gaussian:
        if d == 0:
            return 0.0, 1.0
        if d == 1:
            return 1.0, 1.0
        raise ConfigError(f"Unweighted monomial of degree {d} is not globally Lipschitz")
    value, gradient = gaussian_monomial_bounds(d, zeta)
    growth = min(value, 1.0) if d <= 1 else value
    return gradient, growth


@dataclass(frozen=True, eq=False)
class FieldFamily:
    """
    Family F = (F_1, ..., F_k) of controlled vector fields on R^n

    Attributes:
        name: Registry name of the family
        dim: Ambient dimension n
        channels: Channel descriptions, one per control component
        zeta: Width of the Gaussian weight
        params: Parameters the family was built with (for the descriptor)
        lipschitz_constant: L with sup_i |F_i(x) - F_i(y)| / |x - y| <= L
        growth_constant: C with |F_i(x)| <= C (1 + |x|)
    """

    name: str
    dim: int
    channels: Tuple[MonomialChannel, ...]
    zeta: float = 10.0
    params: Dict[str, Any] = field(default_factory=dict)
    lipschitz_constant: float = field(init=False)
    growth_constant: float = field(init=False)
    _exponents: np.ndarray = field(init=False, repr=False)
    _outputs: np.ndarray = field(init=False, repr=False)
    _gaussian: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.dim <= 0 or not self.channels:
            raise ConfigError("A field family needs a positive dimension and at least one channel")
        for channel in self.channels:
            if len(channel.exponents) != self.dim or not 0 <= channel.output < self.dim:
                raise ConfigError(f"Channel {channel} does not fit dimension {self.dim}")
        constants = [channel_constants(c, self.zeta) for c in self.channels]
        object.__setattr__(self, "lipschitz_constant", max(L for L, _ in constants))
        object.__setattr__(self, "growth_constant", max(C for _, C in constants))

        exponents = np.array([c.exponents for c in self.channels], dtype=float)
        outputs = np.zeros((self.dim, self.k))
        for index, channel in enumerate(self.channels):
            outputs[channel.output, index] = 1.0
        weights = np.array([1.0 if c.gaussian else 0.0 for c in self.channels])
        for array in (exponents, outputs, weights):
            array.setflags(write=False)
        object.__setattr__(self, "_exponents", exponents)
        object.__setattr__(self, "_outputs", outputs)
        object.__setattr__(self, "_gaussian", weights)

    @property
    def k(self) -> int:
        return len(self.channels)

    @property
    def descriptor(self) -> str:
        if not self.params:
            return self.name
        rendered = ",".join(f"{key}={value:g}" if isinstance(value, float) else f"{key}={value}"
                            for key, value in sorted(self.params.items()))
        return f"{self.name}:{rendered}"

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def _as_batch(self, points: np.ndarray) -> Tuple[np.ndarray, bool]:
        x = np.asarray(points, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.dim:
            raise ValueError(f"Expected points of dimension {self.dim}, got {x.shape[1]}")
        return x, single

    def _scalar_parts(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Monomial values (N, k) and Gaussian weight powers (N, k)"""
        monomials = np.prod(x[:, None, :] ** self._exponents[None, :, :], axis=2)
        gauss = np.exp(-np.einsum("ij,ij->i", x, x) / (2.0 * self.zeta))
        weights = np.where(self._gaussian[None, :] > 0, gauss[:, None], 1.0)
        return monomials, weights

    def channel_values(self, points: np.ndarray) -> np.ndarray:
        """Scalar profiles phi_c(x), shape (N, k)"""
        x, _ = self._as_batch(points)
        monomials, weights = self._scalar_parts(x)
        return monomials * weights

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """
        Field matrix F(x)

        Args:
            points: One point (n,) or a batch (N, n)

        Returns:
            (n, k) or (N, n, k) array whose columns are F_1(x), ..., F_k(x)
        """
        x, single = self._as_batch(points)
        phi = self.channel_values(x)
        matrix = self._outputs[None, :, :] * phi[:, None, :]
        return matrix[0] if single else matrix

    def velocity(self, points: np.ndarray, u: np.ndarray) -> np.ndarray:
        """F(x) u for a batch of points and one control vector, shape (N, n)"""
        x, single = self._as_batch(points)
        phi = self.channel_values(x)
        vel = (phi * np.asarray(u, dtype=float)[None, :]) @ self._outputs.T
        return vel[0] if single else vel

    def channel_gradients(self, points: np.ndarray) -> np.ndarray:
        """Gradients of the scalar profiles, shape (N, k, n)"""
        x, _ = self._as_batch(points)
        monomials, weights = self._scalar_parts(x)
        n = self.dim
        grads = np.zeros((x.shape[0], self.k, n))
        for d in range(n):
            lowered = np.array(self._exponents)
            coefficient = lowered[:, d].copy()
            lowered[:, d] = np.maximum(lowered[:, d] - 1.0, 0.0)
            partial = np.prod(x[:, None, :] ** lowered[None, :, :], axis=2)
            grads[:, :, d] = coefficient[None, :] * partial
        # grad(g * P) = g * (grad P - P x / zeta)
        gaussian_term = monomials[:, :, None] * x[:, None, :] / self.zeta
        grads = grads - self._gaussian[None, :, None] * gaussian_term
        return grads * weights[:, :, None]

    def jacobian(self, points: np.ndarray, u: np.ndarray) -> np.ndarray:
        """
        Jacobian of x -> F(x) u

        Returns:
            (n, n) or (N, n, n) array with entry [a, b] = d(F(x)u)_a / dx_b
        """
        x, single = self._as_batch(points)
        grads = self.channel_gradients(x)
        jac = np.einsum("ac,c,Ncb->Nab", self._outputs, np.asarray(u, dtype=float), grads)
        return jac[0] if single else jac

    def __repr__(self) -> str:
        return f"FieldFamily({self.descriptor}, n={self.dim}, k={self.k})"


# ----------------------------------------------------------------------
# Built-in channel sets
# ----------------------------------------------------------------------

def _unit(dim: int, index: int) -> Tuple[int, ...]:
    return tuple(1 if d == index else 0 for d in range(dim))


def _zeros(dim: int) -> Tuple[int, ...]:
    return (0,) * dim


def translation_channels(dim: int) -> List[MonomialChannel]:
    """F_i = d/dx_i"""
    return [MonomialChannel(i, _zeros(dim)) for i in range(dim)]


def gaussian_constant_channels(dim: int) -> List[MonomialChannel]:
    """F'_i = exp(-|x|^2 / (2 zeta)) d/dx_i"""
    return [MonomialChannel(i, _zeros(dim), gaussian=True) for i in range(dim)]


def linear_channels(dim: int) -> List[MonomialChannel]:
    """x_j d/dx_i for every (i, j), row-major in (i, j)"""
    return [MonomialChannel(i, _unit(dim, j)) for i in range(dim) for j in range(dim)]


def gaussian_quadratic_channels(dim: int) -> List[MonomialChannel]:
    """exp(-|x|^2 / (2 zeta)) x_a x_b d/dx_i for a <= b"""
    channels = []
    for i in range(dim):
        for a in range(dim):
            for b in range(a, dim):
                exponents = [0] * dim
                exponents[a] += 1
                exponents[b] += 1
                channels.append(MonomialChannel(i, tuple(exponents), gaussian=True))
    return channels


def translations(dim: int = 2) -> FieldFamily:
    """Translation fields, k = n"""
    return FieldFamily("translations", dim, tuple(translation_channels(dim)), params={"dim": dim})


def linear(dim: int = 1) -> FieldFamily:
    """Linear fields x_j d/dx_i, k = n^2"""
    return FieldFamily("linear", dim, tuple(linear_channels(dim)), params={"dim": dim})


def hermite2d(zeta: float = 10.0) -> FieldFamily:
    """
    14-channel family on R^2

    Two constants, two Gaussian-weighted constants, four linear fields and six
    Gaussian-weighted quadratics, in that order.
    """
    channels = (
        translation_channels(2)
        + gaussian_constant_channels(2)
        + linear_channels(2)
        + gaussian_quadratic_channels(2)
    )
    return FieldFamily("hermite2d", 2, tuple(channels), zeta=float(zeta), params={"zeta": float(zeta)})


def hermite_nd(dim: int = 2, zeta: float = 10.0) -> FieldFamily:
    """Constants and Gaussian-weighted constants on R^n, k = 2n"""
    channels = translation_channels(dim) + gaussian_constant_channels(dim)
    return FieldFamily("hermiteNd", dim, tuple(channels), zeta=float(zeta),
                       params={"dim": dim, "zeta": float(zeta)})


def custom_family(name: str, dim: int, channels: Sequence[MonomialChannel], zeta: float = 10.0) -> FieldFamily:
    """Family from an explicit channel list"""
    return FieldFamily(name, dim, tuple(channels), zeta=float(zeta))
