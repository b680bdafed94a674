"""
Experiment Generators - disc triangulation, analytic target map and sampling

The built-in experiment transports the uniform measure on a disc through the
gradient of f(x) = sqrt((x - v)^T Q (x - v) + c), a strictly convex function, so
T = grad f is the optimal transport map between mu and T_# mu.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..core.errors import ConfigError
from ..transport.measure import DiscreteMeasure, build_measure
from .rng import SplitMix64

DEFAULT_Q = ((3.0, 1.0), (1.0, 2.0))
DEFAULT_V = (0.5, 0.5)
DEFAULT_C = 2.0


def disc_triangulation(radius: float, spacing: float) -> DiscreteMeasure:
    """
    Vertices of a regular triangular lattice inside the closed disc

    Rows are ``spacing * sqrt(3) / 2`` apart, odd rows are shifted by
    ``spacing / 2`` and the origin is a vertex. Atoms are ordered row by row from
    the bottom and carry uniform weights.

    Raises:
        ConfigError: Non-positive radius or spacing
    """
    if radius <= 0 or spacing <= 0:
        raise ConfigError("Disc radius and lattice spacing must be positive")
    row_height = spacing * math.sqrt(3.0) / 2.0
    rows = int(math.floor(radius / row_height)) + 1
    cols = int(math.floor(radius / spacing)) + 2
    limit = (radius + 1e-12) ** 2

    points = []
    for j in range(-rows, rows + 1):
        y = j * row_height
        offset = spacing / 2.0 if j % 2 else 0.0
        for i in range(-cols, cols + 1):
            x = i * spacing + offset
            if x * x + y * y <= limit:
                points.append((x, y))
    if not points:
        raise ConfigError(f"No lattice vertex inside a disc of radius {radius}")
    return build_measure(points)


@dataclass(frozen=True, eq=False)
class TargetMap:
    """
    T(x) = Q (x - v) / sqrt((x - v)^T Q (x - v) + c)

    Attributes:
        Q: Symmetric positive-definite 2x2 matrix
        v: Center
        c: Positive offset under the square root
    """

    Q: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_Q))
    v: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_V))
    c: float = DEFAULT_C

    def potential(self, x: Sequence[float]) -> float:
        """f(x) = sqrt((x - v)^T Q (x - v) + c)"""
        d = np.asarray(x, dtype=float) - self.v
        return math.sqrt(self._radicand(d))

    def _radicand(self, d: np.ndarray) -> float:
        value = float(d @ self.Q @ d) + self.c
        if value <= 0:
            raise ValueError(f"Non-positive radicand {value:.6g} in target map")
        return value

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.v
        return (self.Q @ d) / math.sqrt(self._radicand(d))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Vectorized T over the rows of ``points``"""
        d = np.asarray(points, dtype=float) - self.v[None, :]
        qd = d @ self.Q.T
        radicand = np.einsum("ij,ij->i", d, qd) + self.c
        if np.any(radicand <= 0):
            raise ValueError("Non-positive radicand in target map")
        return qd / np.sqrt(radicand)[:, None]


def target_map(
    x: Sequence[float],
    Q: Sequence[Sequence[float]] = DEFAULT_Q,
    v: Sequence[float] = DEFAULT_V,
    c: float = DEFAULT_C,
) -> np.ndarray:
    """
    Gradient of f(x) = sqrt((x - v)^T Q (x - v) + c)

    Raises:
        ValueError: Non-positive radicand
    """
    return TargetMap(np.asarray(Q, dtype=float), np.asarray(v, dtype=float), float(c))(x)


def sample_disc(radius: float, n_samples: int, rng: SplitMix64) -> DiscreteMeasure:
    """``n_samples`` i.i.d. uniform points on the disc, uniform weights"""
    if n_samples < 1:
        raise ConfigError("Sample count must be at least 1")
    return build_measure(rng.uniform_disc(radius, n_samples))


def sample_target(
    radius: float,
    n_samples: int,
    seed: int,
    Q: Sequence[Sequence[float]] = DEFAULT_Q,
    v: Sequence[float] = DEFAULT_V,
    c: float = DEFAULT_C,
    rng: Optional[SplitMix64] = None,
) -> DiscreteMeasure:
    """
    Uniform disc samples mapped through the target map

    Args:
        radius: Disc radius
        n_samples: Number of samples
        seed: Seed of a fresh generator, ignored when ``rng`` is given
        Q, v, c: Target map parameters
        rng: Generator to draw from, advancing its position

    Returns:
        Measure with ``n_samples`` equally weighted atoms
    """
    generator = rng if rng is not None else SplitMix64(seed)
    source = sample_disc(radius, n_samples, generator)
    tmap = TargetMap(np.asarray(Q, dtype=float), np.asarray(v, dtype=float), float(c))
    return build_measure(tmap.apply(source.atoms))
