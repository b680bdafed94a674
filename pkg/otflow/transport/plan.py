"""
Coupling Plans - sparse transport plans between two discrete measures
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from ..core.errors import MeasureError


@dataclass(frozen=True, eq=False)
class CouplingPlan:
    """
    Sparse coupling gamma between a source and a target measure

    Entries are stored as three parallel read-only arrays ``rows``, ``cols`` and
    ``masses``; marginals are cached at construction.

    Attributes:
        n1: Number of source atoms
        n2: Number of target atoms
        rows: Source index of each entry
        cols: Target index of each entry
        masses: Strictly positive mass of each entry
    """

    n1: int
    n2: int
    rows: np.ndarray
    cols: np.ndarray
    masses: np.ndarray
    row_marginal: np.ndarray = field(init=False, repr=False)
    col_marginal: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=np.int64).ravel()
        cols = np.array(self.cols, dtype=np.int64).ravel()
        masses = np.array(self.masses, dtype=float).ravel()
        if not (rows.shape == cols.shape == masses.shape):
            raise MeasureError("Plan rows, cols and masses must have the same length")
        if self.n1 <= 0 or self.n2 <= 0:
            raise MeasureError("Plan marginal sizes must be positive")
        if rows.size and (rows.min() < 0 or rows.max() >= self.n1):
            raise MeasureError(f"Plan source index out of range [0, {self.n1})")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n2):
            raise MeasureError(f"Plan target index out of range [0, {self.n2})")
        if np.any(masses <= 0.0) or not np.all(np.isfinite(masses)):
            raise MeasureError("Plan masses must be finite and strictly positive")

        row_marginal = np.bincount(rows, weights=masses, minlength=self.n1)
        col_marginal = np.bincount(cols, weights=masses, minlength=self.n2)
        for name, value in (
            ("rows", rows), ("cols", cols), ("masses", masses),
            ("row_marginal", row_marginal), ("col_marginal", col_marginal),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @classmethod
    def from_entries(cls, n1: int, n2: int, entries: Sequence[Tuple[int, int, float]]) -> "CouplingPlan":
        """Build a plan from ``(i, j, mass)`` triples"""
        if entries:
            rows, cols, masses = zip(*entries)
        else:
            rows, cols, masses = (), (), ()
        return cls(n1=n1, n2=n2, rows=np.array(rows, dtype=np.int64),
                   cols=np.array(cols, dtype=np.int64), masses=np.array(masses, dtype=float))

    @classmethod
    def identity(cls, weights: np.ndarray) -> "CouplingPlan":
        """Diagonal plan coupling a measure with itself"""
        n = int(len(weights))
        index = np.arange(n, dtype=np.int64)
        return cls(n1=n, n2=n, rows=index, cols=index, masses=np.asarray(weights, dtype=float))

    @property
    def support_size(self) -> int:
        return int(self.masses.size)

    def entries(self) -> Iterator[Tuple[int, int, float]]:
        for i, j, m in zip(self.rows.tolist(), self.cols.tolist(), self.masses.tolist()):
            yield i, j, m

    def row_entries(self) -> List[List[Tuple[int, float]]]:
        """Per source atom, the list of ``(j, mass)`` pairs of its row"""
        grouped: List[List[Tuple[int, float]]] = [[] for _ in range(self.n1)]
        for i, j, m in self.entries():
            grouped[i].append((j, m))
        return grouped

    def row_mass(self, i: int) -> float:
        return float(self.row_marginal[i])

    def marginal_residual(self, source_weights: np.ndarray, target_weights: np.ndarray) -> float:
        """Largest absolute deviation of the cached marginals from the given weights"""
        return float(max(
            np.max(np.abs(self.row_marginal - source_weights)),
            np.max(np.abs(self.col_marginal - target_weights)),
        ))

    def check_feasible(self, source_weights: np.ndarray, target_weights: np.ndarray, tol: float = 1e-9) -> None:
        """
        Assert the plan is admissible for the given marginals

        Raises:
            MeasureError: Size mismatch, marginal residual above ``tol`` or support
                above the ``n1 + n2`` sparsity bound
        """
        if len(source_weights) != self.n1 or len(target_weights) != self.n2:
            raise MeasureError(
                f"Plan of shape ({self.n1}, {self.n2}) does not match measures of sizes "
                f"({len(source_weights)}, {len(target_weights)})"
            )
        residual = self.marginal_residual(source_weights, target_weights)
        if residual > tol:
            raise MeasureError(f"Plan marginals off by {residual:.3e} (tolerance {tol:.1e})")
        if self.support_size > self.n1 + self.n2:
            raise MeasureError(
                f"Plan support {self.support_size} exceeds the sparsity bound {self.n1 + self.n2}"
            )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n1, self.n2))
        np.add.at(dense, (self.rows, self.cols), self.masses)
        return dense

    def to_dict(self) -> Dict[str, object]:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "entries": [[i, j, m] for i, j, m in self.entries()],
        }

    def __repr__(self) -> str:
        return f"CouplingPlan(n1={self.n1}, n2={self.n2}, support={self.support_size})"
