"""
Discrete Measures - weighted atom clouds in R^n

Provides the immutable :class:`DiscreteMeasure`, its normalizing constructor
:func:`build_measure`, the squared Euclidean ground cost and pushforwards through
point maps.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from typing_extensions import Protocol, runtime_checkable

from ..core.errors import MeasureError

ArrayLike = Union[Sequence[Sequence[float]], np.ndarray]


@runtime_checkable
class PointMap(Protocol):
    """Callable mapping one point of R^n to another"""

    def __call__(self, x: np.ndarray) -> Sequence[float]: ...


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """
    Discrete probability measure

    Attributes:
        atoms: Array of shape (N, dim), one atom per row
        weights: Array of shape (N,), strictly positive, summing to one

    Both arrays are read-only; instances are safe to share across threads.
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.ndim != 2 or atoms.shape[0] == 0:
            raise MeasureError("A measure needs a non-empty (N, dim) array of atoms")
        if atoms.shape[1] == 0:
            raise MeasureError("Atoms must have positive dimension")
        if weights.shape != (atoms.shape[0],):
            raise MeasureError(
                f"Expected {atoms.shape[0]} weights, got shape {weights.shape}"
            )
        if not np.all(np.isfinite(atoms)):
            raise MeasureError("Atoms must be finite")
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise MeasureError("Weights must be finite and strictly positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise MeasureError(f"Weights must sum to 1, got {weights.sum():.17g}")
        object.__setattr__(self, "atoms", _frozen(atoms))
        object.__setattr__(self, "weights", _frozen(weights))

    @property
    def dim(self) -> int:
        return int(self.atoms.shape[1])

    @property
    def size(self) -> int:
        return int(self.atoms.shape[0])

    def __len__(self) -> int:
        return self.size

    def mean(self) -> np.ndarray:
        """Barycenter of the measure"""
        return self.weights @ self.atoms

    def support_radius(self) -> float:
        """Largest Euclidean norm among the atoms"""
        return float(np.max(np.linalg.norm(self.atoms, axis=1)))

    def same_as(self, other: "DiscreteMeasure") -> bool:
        """Exact equality of atoms and weights"""
        return (
            self.atoms.shape == other.atoms.shape
            and bool(np.array_equal(self.atoms, other.atoms))
            and bool(np.array_equal(self.weights, other.weights))
        )

    def __repr__(self) -> str:
        return f"DiscreteMeasure(size={self.size}, dim={self.dim})"


def build_measure(points: ArrayLike, weights: Optional[Sequence[float]] = None) -> DiscreteMeasure:
    """
    Build a normalized discrete measure

    Args:
        points: Atom coordinates, all of the same dimension
        weights: Optional nonnegative weights; uniform 1/N when omitted

    Returns:
        Measure whose weights sum to one; zero-weight atoms are dropped

    Raises:
        MeasureError: Empty input, inconsistent dimensions or zero total mass
    """
    if len(points) == 0:
        raise MeasureError("Cannot build a measure from an empty point list")
    try:
        atoms = np.array([np.asarray(p, dtype=float).ravel() for p in points])
    except ValueError as e:
        raise MeasureError(f"Points have inconsistent dimensions: {e}") from e
    if atoms.dtype == object or atoms.ndim != 2:
        raise MeasureError("Points have inconsistent dimensions")

    if weights is None:
        w = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
    else:
        w = np.asarray(weights, dtype=float).ravel()
        if w.shape[0] != atoms.shape[0]:
            raise MeasureError(f"Got {w.shape[0]} weights for {atoms.shape[0]} points")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise MeasureError("Weights must be finite and nonnegative")
        total = w.sum()
        if total <= 0.0:
            raise MeasureError("Weights must have positive sum")
        keep = w > 0.0
        atoms, w = atoms[keep], w[keep] / total
        # Renormalize once more so the sum is exact to rounding
        w = w / w.sum()

    return DiscreteMeasure(atoms=atoms, weights=w)


def squared_cost(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Squared Euclidean distance |x - y|^2

    Raises:
        MeasureError: Points of different dimension
    """
    xa = np.asarray(x, dtype=float).ravel()
    ya = np.asarray(y, dtype=float).ravel()
    if xa.shape != ya.shape:
        raise MeasureError(f"Dimension mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    diff = xa - ya
    return float(diff @ diff)


def pairwise_squared_costs(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Dense matrix of squared distances between the rows of ``x`` and ``y``"""
    diff = x[:, None, :] - y[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def with_atoms(mu: DiscreteMeasure, images: np.ndarray) -> DiscreteMeasure:
    """
    Replace the atoms of ``mu`` keeping its weights bit-for-bit

    Raises:
        MeasureError: Wrong number of images or non-finite image points
    """
    images = np.asarray(images, dtype=float)
    if images.ndim != 2 or images.shape[0] != mu.size:
        raise MeasureError(f"Expected {mu.size} image points, got array of shape {images.shape}")
    if not np.all(np.isfinite(images)):
        bad = int(np.argmin(np.all(np.isfinite(images), axis=1)))
        raise MeasureError(f"Non-finite image point for atom {bad}")
    return DiscreteMeasure(atoms=images, weights=mu.weights)


def pushforward(mu: DiscreteMeasure, point_map: PointMap) -> DiscreteMeasure:
    """
    Pushforward of ``mu`` through a point map

    Args:
        mu: Source measure
        point_map: Function applied to every atom

    Returns:
        Measure with mapped atoms and unchanged weights

    Raises:
        MeasureError: Non-finite image point
    """
    images = np.array([np.asarray(point_map(x.copy()), dtype=float).ravel() for x in mu.atoms])
    return with_atoms(mu, images)
