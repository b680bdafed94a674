"""
Discrete Cost Functional - terminal coupling cost, covectors and gradients

The functional minimized by the trainers is

    J(u) = sum_{(i, j)} gamma_ij |Phi_u(x_i) - y_j|^2 + (beta / 2) ||u||_L2^2

with Phi_u the explicit Euler flow. Covectors follow the sign convention of the
maximum principle: lambda^M_i = -2 sum_j gamma_ij (z^M_i - y_j).
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.errors import MeasureError
from ..dynamics.control import ControlSchedule
from ..dynamics.fields import FieldFamily
from ..dynamics.flow import integrate
from ..transport.measure import DiscreteMeasure, pairwise_squared_costs
from ..transport.plan import CouplingPlan

PlanRow = Sequence[Tuple[int, float]]


def check_plan_matches(plan: CouplingPlan, mu: DiscreteMeasure, nu: DiscreteMeasure) -> None:
    if plan.n1 != mu.size or plan.n2 != nu.size:
        raise MeasureError(
            f"Plan of shape ({plan.n1}, {plan.n2}) does not match measures of sizes ({mu.size}, {nu.size})"
        )


def terminal_cost(z_final: np.ndarray, nu: DiscreteMeasure, plan: CouplingPlan) -> float:
    """sum over plan entries of mass * |z_i - y_j|^2"""
    residual = z_final[plan.rows] - nu.atoms[plan.cols]
    return float(plan.masses @ np.einsum("ij,ij->i", residual, residual))


def cost_functional(
    field: FieldFamily,
    u: ControlSchedule,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    beta: float,
) -> float:
    """
    Discrete cost J(u) on the Euler terminal states

    Raises:
        MeasureError: Plan does not match the measures
        FlowBlowUpError: The flow left the finite range
    """
    check_plan_matches(plan, mu, nu)
    states = integrate(field, u, mu.atoms)
    return terminal_cost(states[-1], nu, plan) + 0.5 * beta * u.l2_norm_squared()


def terminal_covector(z_final: Sequence[float], plan_row: PlanRow, nu_atoms: np.ndarray) -> np.ndarray:
    """lambda^M = -2 sum_j gamma_ij (z^M - y_j) for one source atom"""
    z = np.asarray(z_final, dtype=float)
    lam = np.zeros_like(z)
    for j, mass in plan_row:
        lam -= 2.0 * mass * (z - nu_atoms[j])
    return lam


def terminal_covectors(z_final: np.ndarray, nu: DiscreteMeasure, plan: CouplingPlan) -> np.ndarray:
    """Batched :func:`terminal_covector`, shape (N1, n)"""
    residual = z_final[plan.rows] - nu.atoms[plan.cols]
    lam = np.zeros_like(z_final)
    np.add.at(lam, plan.rows, -2.0 * plan.masses[:, None] * residual)
    return lam


def corrected_covector(
    lambda_l: Sequence[float],
    z_old: Sequence[float],
    z_new: Sequence[float],
    plan_row: PlanRow,
    nu_atoms: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Covector shifted by the change of the terminal residual

    lambda + 2 sum_j gamma_ij (z_old - y_j) - 2 sum_j gamma_ij (z_new - y_j),
    which reduces to lambda - 2 (sum_j gamma_ij) (z_new - z_old).
    """
    row_mass = sum(mass for _, mass in plan_row)
    return np.asarray(lambda_l, dtype=float) - 2.0 * row_mass * (
        np.asarray(z_new, dtype=float) - np.asarray(z_old, dtype=float)
    )


def corrected_covectors(lam: np.ndarray, z_old: np.ndarray, z_new: np.ndarray, row_mass: np.ndarray) -> np.ndarray:
    """Batched :func:`corrected_covector`"""
    return lam - 2.0 * row_mass[:, None] * (z_new - z_old)


def hamiltonian_coefficients(field: FieldFamily, lam: np.ndarray, z: np.ndarray) -> np.ndarray:
    """a_j = sum_i lambda_i . F_j(z_i), shape (k,)"""
    return np.einsum("Na,Nak->k", lam, field.evaluate(z))


def maximize_augmented_hamiltonian(a: np.ndarray, u_l: np.ndarray, beta: float, rho: float) -> np.ndarray:
    """
    Maximizer of  a . v - (beta/2)|v|^2 - (1/(2 rho))|v - u_l|^2

    The Hessian is diagonal, so the stationary point is explicit:
    v* = (rho a + u_l) / (1 + rho beta).
    """
    if beta <= 0 or rho <= 0:
        raise ValueError("beta and rho must be positive")
    return (rho * np.asarray(a, dtype=float) + np.asarray(u_l, dtype=float)) / (1.0 + rho * beta)


def cost_and_gradient(
    field: FieldFamily,
    u: ControlSchedule,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    beta: float,
) -> Tuple[float, np.ndarray]:
    """
    Cost J(u) and its exact gradient with respect to every u_{j,l}

    The covector recursion is the transpose of the forward Euler step,
    lambda^{l-1} = lambda^l (I + h A_l), and the gradient reads
    dJ/du_{j,l} = -h sum_i lambda_i^l . F_j(z_i^{l-1}) + beta h u_{j,l}.

    Returns:
        (cost, (M, k) gradient)
    """
    check_plan_matches(plan, mu, nu)
    states = integrate(field, u, mu.atoms)
    cost = terminal_cost(states[-1], nu, plan) + 0.5 * beta * u.l2_norm_squared()

    h = u.h
    lam = terminal_covectors(states[-1], nu, plan)
    grad = np.empty((u.M, u.k))
    for l in range(u.M, 0, -1):
        z_prev, u_l = states[l - 1], u.values[l - 1]
        grad[l - 1] = -h * hamiltonian_coefficients(field, lam, z_prev) + beta * h * u_l
        A = field.jacobian(z_prev, u_l)
        lam = lam + h * np.einsum("Na,Nab->Nb", lam, A)
    return cost, grad


def adjoint_gradient(
    field: FieldFamily,
    u: ControlSchedule,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    beta: float,
) -> np.ndarray:
    """Exact (M, k) gradient of :func:`cost_functional`"""
    return cost_and_gradient(field, u, mu, nu, plan, beta)[1]


def minimizer_norm_bound(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    beta: float,
    plan: Optional[CouplingPlan] = None,
) -> float:
    """
    Bound on ||u_hat||^2 for any control with J(u_hat) <= J(0)

    (2 / beta) times the largest squared distance over the plan support, or over
    all atom pairs when no plan is given.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if plan is not None:
        check_plan_matches(plan, mu, nu)
        residual = mu.atoms[plan.rows] - nu.atoms[plan.cols]
        largest = float(np.max(np.einsum("ij,ij->i", residual, residual))) if plan.support_size else 0.0
    else:
        largest = float(np.max(pairwise_squared_costs(mu.atoms, nu.atoms)))
    return 2.0 / beta * largest
