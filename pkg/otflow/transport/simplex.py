"""
Transportation Simplex - exact discrete optimal transport with sparse plans

Solves the balanced transportation problem

    min  sum_ij c_ij x_ij   s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0

for the squared Euclidean cost. The basis is a spanning tree of the bipartite
row/column graph, so every returned plan has at most N1 + N2 - 1 entries.

Degeneracy is removed with the classical lexicographic perturbation
a_i + eps, b_last + N1*eps: every flow is tracked as a pair (value, eps
coefficient) and compared lexicographically, which keeps all basic flows
strictly positive and rules out cycling. The eps part is dropped at the end and
the flows are re-solved on the final basis tree with the exact marginals.
"""

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..core.errors import MeasureError
from ..utils.logger import get_logger
from .measure import DiscreteMeasure, pairwise_squared_costs
from .plan import CouplingPlan

logger = get_logger(__name__)

DENSE_COST_LIMIT = 4_000_000
MASS_FLOOR = 1e-14
FLOW_TOL = 1e-13

Cell = Tuple[int, int]


@dataclass
class SolverStats:
    """Bookkeeping of a single transportation simplex solve"""
    n1: int = 0
    n2: int = 0
    pivots: int = 0
    degenerate_pivots: int = 0
    lazy_costs: bool = False
    wall_time: float = 0.0
    optimal_cost: float = 0.0
    basis_size: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "pivots": self.pivots,
            "degenerate_pivots": self.degenerate_pivots,
            "lazy_costs": self.lazy_costs,
            "wall_time": self.wall_time,
            "optimal_cost": self.optimal_cost,
            "basis_size": self.basis_size,
        }


@dataclass(frozen=True)
class TransportSolution:
    """Optimal plan, its cost and solver statistics"""
    plan: CouplingPlan
    cost: float
    stats: SolverStats = field(compare=False)


class _CostOracle:
    """
    Squared Euclidean costs between source and target atoms

    Dense when the matrix has at most ``DENSE_COST_LIMIT`` entries; otherwise rows
    are recomputed in blocks on every pricing pass.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray, dense_limit: int = DENSE_COST_LIMIT):
        self.x = x
        self.y = y
        self.lazy = x.shape[0] * y.shape[0] > dense_limit
        self.dense = None if self.lazy else pairwise_squared_costs(x, y)
        self.block_rows = max(1, dense_limit // (4 * y.shape[0]))

    def entry(self, i: int, j: int) -> float:
        if self.dense is not None:
            return float(self.dense[i, j])
        diff = self.x[i] - self.y[j]
        return float(diff @ diff)

    def scale(self) -> float:
        if self.dense is not None:
            return float(self.dense.max())
        pts = np.vstack([self.x, self.y])
        extent = pts.max(axis=0) - pts.min(axis=0)
        return float(extent @ extent)

    def most_negative(self, u: np.ndarray, v: np.ndarray) -> Tuple[int, int, float]:
        """Cell with the smallest reduced cost c_ij - u_i - v_j; first in row-major order on ties"""
        if self.dense is not None:
            reduced = self.dense - u[:, None] - v[None, :]
            flat = int(np.argmin(reduced))
            i, j = divmod(flat, reduced.shape[1])
            return i, j, float(reduced[i, j])

        best = (0, 0, np.inf)
        for start in range(0, self.x.shape[0], self.block_rows):
            stop = min(start + self.block_rows, self.x.shape[0])
            reduced = pairwise_squared_costs(self.x[start:stop], self.y) - u[start:stop, None] - v[None, :]
            flat = int(np.argmin(reduced))
            bi, bj = divmod(flat, reduced.shape[1])
            value = float(reduced[bi, bj])
            if value < best[2]:
                best = (start + bi, bj, value)
        return best


def _lex_less(a0: float, a1: float, b0: float, b1: float) -> bool:
    """(a0 + a1*eps) < (b0 + b1*eps) for infinitesimal eps, with a float tolerance on the value part"""
    if a0 < b0 - FLOW_TOL:
        return True
    if a0 > b0 + FLOW_TOL:
        return False
    return a1 < b1


class TransportationSimplex:
    """
    Transportation simplex on a spanning-tree basis

    Attributes:
        supply: Source weights a (length N1)
        demand: Target weights b (length N2)
        costs: Cost oracle
        max_pivots: Safety cap on the number of pivots
    """

    def __init__(self, supply: np.ndarray, demand: np.ndarray, costs: _CostOracle, max_pivots: int = 50_000_000):
        self.supply = np.asarray(supply, dtype=float)
        self.demand = np.asarray(demand, dtype=float)
        self.costs = costs
        self.max_pivots = max_pivots
        self.n1 = int(self.supply.size)
        self.n2 = int(self.demand.size)
        self.n_nodes = self.n1 + self.n2
        # flows[(i, j)] = [value, eps coefficient, cost]
        self.flows: Dict[Cell, List[float]] = {}
        self.adjacency: List[set] = [set() for _ in range(self.n_nodes)]
        self.stats = SolverStats(n1=self.n1, n2=self.n2, lazy_costs=costs.lazy)

    # ------------------------------------------------------------------
    # Basis handling
    # ------------------------------------------------------------------

    def _add_cell(self, i: int, j: int, value: float, coef: float) -> None:
        self.flows[(i, j)] = [value, coef, self.costs.entry(i, j)]
        self.adjacency[i].add(self.n1 + j)
        self.adjacency[self.n1 + j].add(i)

    def _remove_cell(self, cell: Cell) -> None:
        i, j = cell
        del self.flows[cell]
        self.adjacency[i].discard(self.n1 + j)
        self.adjacency[self.n1 + j].discard(i)

    def _cell_between(self, p: int, q: int) -> Cell:
        row, col = (p, q) if p < q else (q, p)
        return row, col - self.n1

    def north_west_corner(self) -> None:
        """Initial basic solution of the perturbed problem, N1 + N2 - 1 cells"""
        i = j = 0
        rem_a = (self.supply[0], 1.0)
        rem_b = (self.demand[0], float(self.n1) if self.n2 == 1 else 0.0)
        while True:
            if i == self.n1 - 1 and j == self.n2 - 1:
                self._add_cell(i, j, rem_a[0], rem_a[1])
                break
            if j == self.n2 - 1 or (i < self.n1 - 1 and _lex_less(rem_a[0], rem_a[1], rem_b[0], rem_b[1])):
                self._add_cell(i, j, rem_a[0], rem_a[1])
                rem_b = (rem_b[0] - rem_a[0], rem_b[1] - rem_a[1])
                i += 1
                rem_a = (self.supply[i], 1.0)
            else:
                self._add_cell(i, j, rem_b[0], rem_b[1])
                rem_a = (rem_a[0] - rem_b[0], rem_a[1] - rem_b[1])
                j += 1
                last = j == self.n2 - 1
                rem_b = (self.demand[j], float(self.n1) if last else 0.0)

    def _potentials(self) -> Tuple[np.ndarray, np.ndarray, List[int], List[int]]:
        """Dual potentials with u_0 = 0, plus parent/depth arrays of the basis tree rooted at row 0"""
        potential = np.zeros(self.n_nodes)
        parent = [-1] * self.n_nodes
        depth = [-1] * self.n_nodes
        depth[0] = 0
        queue = deque([0])
        while queue:
            p = queue.popleft()
            for q in self.adjacency[p]:
                if depth[q] >= 0:
                    continue
                depth[q] = depth[p] + 1
                parent[q] = p
                # u_i + v_j = c_ij along every basic cell
                potential[q] = self.flows[self._cell_between(p, q)][2] - potential[p]
                queue.append(q)
        if min(depth) < 0:
            raise AssertionError("Basis is not a spanning tree")
        return potential[: self.n1], potential[self.n1:], parent, depth

    @staticmethod
    def _tree_path(a: int, b: int, parent: List[int], depth: List[int]) -> List[int]:
        """Node path from ``a`` to ``b`` in the rooted basis tree"""
        head: List[int] = []
        tail: List[int] = []
        while depth[a] > depth[b]:
            head.append(a)
            a = parent[a]
        while depth[b] > depth[a]:
            tail.append(b)
            b = parent[b]
        while a != b:
            head.append(a)
            tail.append(b)
            a, b = parent[a], parent[b]
        head.append(a)
        return head + tail[::-1]

    def _pivot(self, i: int, j: int, parent: List[int], depth: List[int]) -> None:
        path = self._tree_path(i, self.n1 + j, parent, depth)
        cells = [self._cell_between(path[k], path[k + 1]) for k in range(len(path) - 1)]
        minus = cells[0::2]
        plus = cells[1::2]

        leaving = minus[0]
        theta = self.flows[leaving]
        for cell in minus[1:]:
            flow = self.flows[cell]
            if _lex_less(flow[0], flow[1], theta[0], theta[1]):
                leaving, theta = cell, flow
        t0, t1 = theta[0], theta[1]
        if t0 <= FLOW_TOL:
            self.stats.degenerate_pivots += 1

        for cell in minus:
            flow = self.flows[cell]
            flow[0] -= t0
            flow[1] -= t1
        for cell in plus:
            flow = self.flows[cell]
            flow[0] += t0
            flow[1] += t1
        self._remove_cell(leaving)
        self._add_cell(i, j, t0, t1)

    # ------------------------------------------------------------------
    # Driver
    # ------------------------------------------------------------------

    def solve(self) -> Dict[Cell, float]:
        """
        Run the simplex to optimality

        Returns:
            Mapping of basic cells to their (unperturbed) masses
        """
        self.north_west_corner()
        tol = 1e-12 * max(1.0, self.costs.scale())

        while True:
            u, v, parent, depth = self._potentials()
            i, j, reduced = self.costs.most_negative(u, v)
            if reduced >= -tol:
                break
            if (i, j) in self.flows:
                # Basic cells have zero reduced cost up to rounding
                break
            self._pivot(i, j, parent, depth)
            self.stats.pivots += 1
            if self.stats.pivots % 500 == 0:
                logger.debug(
                    f"pivot {self.stats.pivots}: entering ({i}, {j}) reduced cost {reduced:.3e}"
                )
            if self.stats.pivots >= self.max_pivots:
                raise RuntimeError(f"Transportation simplex exceeded {self.max_pivots} pivots")

        return self._resolve_tree_flows()

    def _resolve_tree_flows(self) -> Dict[Cell, float]:
        """Recompute basic flows from the exact marginals by leaf elimination on the basis tree"""
        remaining = np.concatenate([self.supply, self.demand])
        degree = [len(neighbours) for neighbours in self.adjacency]
        adjacency = [set(neighbours) for neighbours in self.adjacency]
        leaves = deque(p for p in range(self.n_nodes) if degree[p] == 1)
        masses: Dict[Cell, float] = {}

        while leaves:
            p = leaves.popleft()
            if degree[p] != 1:
                continue
            q = next(iter(adjacency[p]))
            cell = self._cell_between(p, q)
            masses[cell] = float(remaining[p])
            remaining[q] -= remaining[p]
            remaining[p] = 0.0
            adjacency[p].discard(q)
            adjacency[q].discard(p)
            degree[p] -= 1
            degree[q] -= 1
            if degree[q] == 1:
                leaves.append(q)

        if len(masses) != len(self.flows):
            raise AssertionError("Leaf elimination did not cover the basis tree")
        return masses


def solve_transport(mu: DiscreteMeasure, nu: DiscreteMeasure, dense_limit: int = DENSE_COST_LIMIT) -> TransportSolution:
    """
    Exact optimal transport between two discrete measures

    Args:
        mu: Source measure
        nu: Target measure
        dense_limit: Largest number of cost entries kept in memory

    Returns:
        Optimal sparse plan, its squared-Euclidean cost and solver statistics

    Raises:
        MeasureError: Measures of different ambient dimension
    """
    if mu.dim != nu.dim:
        raise MeasureError(f"Dimension mismatch: source {mu.dim} vs target {nu.dim}")

    start = time.perf_counter()
    costs = _CostOracle(mu.atoms, nu.atoms, dense_limit)
    simplex = TransportationSimplex(mu.weights, nu.weights, costs)
    logger.debug(
        f"solving {mu.size}x{nu.size} transport problem ({'lazy' if costs.lazy else 'dense'} costs)"
    )
    basic = simplex.solve()

    entries = [(i, j, m) for (i, j), m in sorted(basic.items()) if m >= MASS_FLOOR]
    plan = CouplingPlan.from_entries(mu.size, nu.size, entries)
    cost = float(sum(m * costs.entry(i, j) for i, j, m in entries))
    # Feasibility and the N1 + N2 support bound hold for every basic solution
    plan.check_feasible(mu.weights, nu.weights)

    stats = simplex.stats
    stats.wall_time = time.perf_counter() - start
    stats.optimal_cost = cost
    stats.basis_size = len(basic)
    logger.debug(
        f"transport solved: {stats.pivots} pivots ({stats.degenerate_pivots} degenerate), "
        f"support {plan.support_size}, cost {cost:.6e}, {stats.wall_time:.2f}s"
    )
    return TransportSolution(plan=plan, cost=cost, stats=stats)


def solve_optimal_plan(mu: DiscreteMeasure, nu: DiscreteMeasure) -> CouplingPlan:
    """
    Optimal coupling between ``mu`` and ``nu`` for the squared Euclidean cost

    Returns:
        Sparse plan with at most N1 + N2 - 1 entries whose cost is W2^2(mu, nu)
    """
    return solve_transport(mu, nu).plan
