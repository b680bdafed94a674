from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from otflow.core.errors import ConfigError, MeasureError, SingularCostateError, TrainingStalled
from otflow.core.status import TerminationReason, TrainingMethod
from otflow.dynamics import ControlSchedule, costates, hermite2d, linear, terminal_states, translations
from otflow.training import (
    TrainerConfig,
    adjoint_gradient,
    corrected_covector,
    corrected_covectors,
    cost_and_gradient,
    cost_functional,
    gradient_descent_train,
    has_converged,
    initial_state,
    maximize_augmented_hamiltonian,
    minimizer_norm_bound,
    pmp_iteration,
    terminal_cost,
    terminal_covector,
    terminal_covectors,
    train,
)
from otflow.transport import CouplingPlan, build_measure, solve_optimal_plan, solve_transport, transport_cost


@pytest.fixture
def dirac_instance():
    """delta at the origin pushed to delta at (1, 0)"""
    mu = build_measure([(0.0, 0.0)])
    nu = build_measure([(1.0, 0.0)])
    return mu, nu, solve_optimal_plan(mu, nu)


@pytest.fixture
def small_instance():
    rng = np.random.default_rng(42)
    mu = build_measure(rng.uniform(-0.5, 0.5, size=(3, 2)))
    nu = build_measure(rng.uniform(-0.5, 0.5, size=(3, 2)) + 0.2)
    return mu, nu, solve_optimal_plan(mu, nu)


class TestTrainerConfig:
    """Test trainer configuration"""

    def test_defaults(self):
        config = TrainerConfig()
        assert config.beta == 5e-4
        assert config.rho0 == 1.0
        assert config.tau == 0.5
        assert config.max_iter == 500
        assert config.rho_min == 1e-10
        assert config.cost_tol == 1e-9
        assert config.rho_reset is False

    @pytest.mark.parametrize(
        "changes",
        [{"beta": 0.0}, {"tau": 1.0}, {"tau": 0.0}, {"rho0": 1e-12}, {"rho_min": 0.0}, {"max_iter": -1}],
    )
    def test_invalid_values(self, changes):
        with pytest.raises(ConfigError):
            TrainerConfig(**changes)

    def test_validate_lists_errors(self):
        config = TrainerConfig()
        config.beta = -1.0
        config.tau = 2.0
        assert len(config.validate()) == 2

    def test_dict_round_trip(self):
        config = TrainerConfig(beta=1e-3, max_iter=7)
        assert TrainerConfig.from_dict(config.to_dict()) == config

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            TrainerConfig.from_dict({"betta": 1.0})

    def test_replace(self):
        assert TrainerConfig().replace(beta=0.1).beta == 0.1


class TestCostFunctional:
    """Test the discrete cost"""

    def test_zero_control_equals_plan_cost(self, small_instance):
        mu, nu, plan = small_instance
        u = ControlSchedule.zeros(8, 14)
        assert cost_functional(hermite2d(), u, mu, nu, plan, 1e-3) == transport_cost(plan, mu, nu)

    def test_zero_control_optimal_plan_is_w2(self, small_instance):
        mu, nu, _ = small_instance
        solution = solve_transport(mu, nu)
        u = ControlSchedule.zeros(8, 14)
        value = cost_functional(hermite2d(), u, mu, nu, solution.plan, 1e-3)
        assert value == pytest.approx(solution.cost, abs=1e-15)

    def test_translation_reaches_target(self, dirac_instance):
        mu, nu, plan = dirac_instance
        u = ControlSchedule.constant(32, [1.0, 0.0])
        assert cost_functional(translations(2), u, mu, nu, plan, 0.0) == 0.0

    def test_plan_mismatch(self, dirac_instance):
        mu, nu, _ = dirac_instance
        plan = CouplingPlan.from_entries(2, 1, [(0, 0, 0.5), (1, 0, 0.5)])
        with pytest.raises(MeasureError):
            cost_functional(translations(2), ControlSchedule.zeros(4, 2), mu, nu, plan, 1.0)


class TestCovectors:
    """Test terminal and corrected covectors"""

    def test_zero_residual(self):
        assert terminal_covector([1.0, 2.0], [(0, 0.5)], np.array([[1.0, 2.0]])).tolist() == [0.0, 0.0]

    def test_single_target(self):
        assert terminal_covector([1.0, 0.0], [(0, 0.5)], np.array([[0.0, 0.0]])).tolist() == [-1.0, 0.0]

    def test_two_targets(self):
        nu_atoms = np.array([[0.0, 0.0], [1.0, -1.0]])
        lam = terminal_covector([1.0, 0.0], [(0, 0.25), (1, 0.25)], nu_atoms)
        assert lam.tolist() == [-0.5, -0.5]

    def test_batched_matches_per_atom(self, small_instance):
        mu, nu, plan = small_instance
        z = mu.atoms + 0.1
        batched = terminal_covectors(z, nu, plan)
        rows = plan.row_entries()
        for i in range(mu.size):
            assert batched[i] == pytest.approx(terminal_covector(z[i], rows[i], nu.atoms), abs=1e-15)

    def test_correction_without_movement(self):
        lam = np.array([0.3, -0.7])
        assert corrected_covector(lam, [1.0, 1.0], [1.0, 1.0], [(0, 0.5)]).tolist() == lam.tolist()

    def test_correction_substitution(self):
        result = corrected_covector([0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [(0, 0.25), (3, 0.25)])
        assert result.tolist() == [-1.0, 0.0]

    def test_correction_parallel_to_movement(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            lam, z_old, z_new = rng.normal(size=(3, 2))
            shift = corrected_covector(lam, z_old, z_new, [(0, 0.3)]) - lam
            move = z_new - z_old
            assert abs(shift[0] * move[1] - shift[1] * move[0]) <= 1e-12

    def test_correction_matches_explicit_residuals(self):
        nu_atoms = np.array([[0.5, 0.0], [-1.0, 2.0]])
        row = [(0, 0.2), (1, 0.1)]
        lam, z_old, z_new = np.array([0.1, 0.2]), np.array([0.3, 0.3]), np.array([0.0, 1.0])
        explicit = lam - terminal_covector(z_old, row, nu_atoms) + terminal_covector(z_new, row, nu_atoms)
        assert corrected_covector(lam, z_old, z_new, row, nu_atoms) == pytest.approx(explicit, abs=1e-15)
        batched = corrected_covectors(lam[None, :], z_old[None, :], z_new[None, :], np.array([0.3]))
        assert batched[0] == pytest.approx(explicit, abs=1e-15)


class TestAugmentedHamiltonian:
    """Test the closed-form maximizer"""

    def test_symmetric_maximum(self):
        assert maximize_augmented_hamiltonian(np.zeros(3), np.zeros(3), 1.0, 1.0).tolist() == [0.0, 0.0, 0.0]

    def test_unit_instance(self):
        v = maximize_augmented_hamiltonian(np.array([1.0, 0.0]), np.zeros(2), 1.0, 1.0)
        assert v.tolist() == [0.5, 0.0]

    def test_matches_numeric_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            k = int(rng.integers(1, 5))
            a, u_l = rng.normal(size=k), rng.normal(size=k)
            beta, rho = rng.uniform(0.1, 2.0), rng.uniform(0.1, 5.0)
            v = maximize_augmented_hamiltonian(a, u_l, beta, rho)
            for j in range(k):
                def slope(x, j=j):
                    return a[j] - beta * x - (x - u_l[j]) / rho
                # the objective is strictly concave, its slope has one root
                root = brentq(slope, -1e3, 1e3, xtol=1e-14, rtol=1e-15)
                assert v[j] == pytest.approx(root, abs=1e-10)

    @pytest.mark.parametrize("beta, rho", [(0.0, 1.0), (1.0, 0.0)])
    def test_nonpositive_parameters(self, beta, rho):
        with pytest.raises(ValueError):
            maximize_augmented_hamiltonian(np.zeros(1), np.zeros(1), beta, rho)


class TestAdjointGradient:
    """Test the exact discrete gradient"""

    def test_zero_at_global_minimum(self):
        mu = build_measure([(0.1, 0.2), (-0.3, 0.0)])
        plan = CouplingPlan.identity(mu.weights)
        grad = adjoint_gradient(hermite2d(), ControlSchedule.zeros(4, 14), mu, mu, plan, 1e-2)
        assert np.all(grad == 0)

    def test_regularizer_only(self):
        mu = build_measure([(0.0, 0.0)])
        nu = build_measure([(1.0, 0.0)])
        plan = solve_optimal_plan(mu, nu)
        u = ControlSchedule.constant(4, [1.0, 0.0])
        grad = adjoint_gradient(translations(2), u, mu, nu, plan, 0.3)
        assert grad == pytest.approx(0.3 * u.h * u.values, abs=1e-15)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        field = hermite2d()
        mu = build_measure(rng.uniform(-0.5, 0.5, size=(3, 2)))
        nu = build_measure(rng.uniform(-0.5, 0.5, size=(3, 2)))
        plan = solve_optimal_plan(mu, nu)
        beta, step = 1e-2, 1e-6
        u = ControlSchedule(0.5 * rng.normal(size=(4, field.k)))
        grad = adjoint_gradient(field, u, mu, nu, plan, beta)

        numeric = np.empty_like(grad)
        for l in range(u.M):
            for j in range(u.k):
                bump = np.zeros_like(u.values)
                bump[l, j] = step
                plus = cost_functional(field, u.with_values(u.values + bump), mu, nu, plan, beta)
                minus = cost_functional(field, u.with_values(u.values - bump), mu, nu, plan, beta)
                numeric[l, j] = (plus - minus) / (2 * step)
        assert np.max(np.abs(grad - numeric)) <= 1e-5 * np.max(np.abs(numeric))

    def test_cost_matches_functional(self, small_instance):
        mu, nu, plan = small_instance
        u = ControlSchedule(np.random.default_rng(1).normal(size=(8, 14)))
        cost, _ = cost_and_gradient(hermite2d(), u, mu, nu, plan, 1e-3)
        assert cost == cost_functional(hermite2d(), u, mu, nu, plan, 1e-3)


class TestMinimizerNormBound:
    """Test the a-priori control bound"""

    def test_shared_atom(self):
        mu = build_measure([(0.3, 0.3)])
        assert minimizer_norm_bound(mu, mu, 1.0) == 0.0

    def test_substitution(self, dirac_instance):
        mu, nu, plan = dirac_instance
        assert minimizer_norm_bound(mu, nu, 2.0) == 1.0
        assert minimizer_norm_bound(mu, nu, 2.0, plan) == 1.0

    def test_nonpositive_beta(self, dirac_instance):
        mu, nu, _ = dirac_instance
        with pytest.raises(ValueError):
            minimizer_norm_bound(mu, nu, 0.0)


class TestPMPIteration:
    """Test single iterations of the maximum principle"""

    def test_optimal_start_backtracks(self):
        mu = build_measure([(0.1, 0.2), (-0.3, 0.0)])
        plan = CouplingPlan.identity(mu.weights)
        config = TrainerConfig(beta=1e-3)
        state = initial_state(hermite2d(), ControlSchedule.zeros(8, 14), mu, mu, plan, config)
        after = pmp_iteration(state, hermite2d(), mu, mu, plan, config)
        assert not after.history[-1].accepted
        assert after.cost == state.cost
        assert after.rho == config.tau * state.rho

    def test_rejection_is_pure(self, dirac_instance):
        mu, nu, plan = dirac_instance
        # A huge penalty overshoots the target and is rejected
        config = TrainerConfig(beta=1e-6, rho0=1e3)
        field = translations(2)
        state = initial_state(field, ControlSchedule.zeros(32, 2), mu, nu, plan, config)
        after = pmp_iteration(state, field, mu, nu, plan, config)
        assert not after.history[-1].accepted
        assert after.u is state.u
        assert np.array_equal(after.states, state.states)
        assert after.cost == state.cost
        assert after.rho == config.tau * state.rho
        assert after.flag is False
        assert after.iteration == 1

    def test_acceptance_recomputes_cost(self, small_instance):
        mu, nu, plan = small_instance
        config = TrainerConfig(beta=1e-3, rho0=0.5)
        field = hermite2d()
        state = initial_state(field, ControlSchedule.zeros(8, 14), mu, nu, plan, config)
        for _ in range(10):
            state = pmp_iteration(state, field, mu, nu, plan, config)
            if state.history[-1].accepted:
                assert state.flag is True
                recomputed = cost_functional(field, state.u, mu, nu, plan, config.beta)
                assert state.cost == pytest.approx(recomputed, abs=1e-10)

    def test_stalled_below_floor(self, dirac_instance):
        mu, nu, plan = dirac_instance
        config = TrainerConfig(rho0=1e-3, rho_min=1e-4)
        state = initial_state(translations(2), ControlSchedule.zeros(4, 2), mu, nu, plan, config)
        with pytest.raises(TrainingStalled):
            pmp_iteration(replace(state, rho=1e-5), translations(2), mu, nu, plan, config)

    def test_blow_up_counts_as_rejection(self):
        mu = build_measure([(1.0,)])
        nu = build_measure([(2.0,)])
        plan = solve_optimal_plan(mu, nu)
        config = TrainerConfig(beta=1e-6, rho0=1e308)
        state = initial_state(linear(1), ControlSchedule.zeros(4, 1), mu, nu, plan, config)
        after = pmp_iteration(state, linear(1), mu, nu, plan, config)
        assert not after.history[-1].accepted
        assert after.history[-1].cost == float("inf")
        assert after.history[-1].to_dict()["cost"] is None


class TestTrain:
    """Test full training runs"""

    def test_zero_iterations_returns_start(self, small_instance):
        mu, nu, plan = small_instance
        result = train(hermite2d(), mu, nu, plan, TrainerConfig(max_iter=0), steps=8)
        assert np.all(result.control.values == 0)
        assert result.cost == transport_cost(plan, mu, nu)
        assert result.iterations == 0
        assert result.reason is TerminationReason.MAX_ITER
        assert result.method is TrainingMethod.PMP

    def test_translation_instance(self, dirac_instance):
        mu, nu, plan = dirac_instance
        field = translations(2)
        result = train(field, mu, nu, plan, TrainerConfig(beta=1e-6, rho0=10.0, max_iter=300))
        assert terminal_cost(terminal_states(field, result.control, mu.atoms), nu, plan) <= 1e-4
        costs = result.accepted_costs()
        assert costs
        assert all(b < a for a, b in zip(costs, costs[1:]))

    def test_accepted_costs_decrease(self, small_instance):
        mu, nu, plan = small_instance
        result = train(hermite2d(), mu, nu, plan, TrainerConfig(beta=1e-3, max_iter=40), steps=8)
        costs = [result.initial_cost] + result.accepted_costs()
        assert all(b < a for a, b in zip(costs, costs[1:]))
        assert result.cost == costs[-1]

    def test_norm_bound_holds(self, small_instance):
        mu, nu, plan = small_instance
        beta = 1e-2
        result = train(hermite2d(), mu, nu, plan, TrainerConfig(beta=beta, max_iter=40), steps=8)
        assert result.control.l2_norm_squared() <= minimizer_norm_bound(mu, nu, beta, plan)

    def test_beta_limit(self, dirac_instance):
        mu, nu, plan = dirac_instance
        field = translations(2)
        terminal = []
        for beta in (1e-2, 1e-3, 1e-4):
            result = train(field, mu, nu, plan, TrainerConfig(beta=beta, rho0=10.0, max_iter=300))
            terminal.append(terminal_cost(terminal_states(field, result.control, mu.atoms), nu, plan))
        assert terminal[0] > terminal[1] > terminal[2]

    def test_result_record(self, dirac_instance):
        mu, nu, plan = dirac_instance
        result = train(translations(2), mu, nu, plan, TrainerConfig(max_iter=5), steps=4)
        record = result.to_dict(include_timing=False)
        assert "wall_time" not in record
        assert record["method"] == "pmp"
        assert len(record["history"]) == result.iterations
        assert "wall_time" in result.to_dict()

    def test_incompatible_start(self, dirac_instance):
        mu, nu, plan = dirac_instance
        with pytest.raises(ConfigError):
            train(translations(2), mu, nu, plan, TrainerConfig(), u0=ControlSchedule.zeros(4, 3))

    def test_singular_costates_keep_accepted_control(self, dirac_instance, monkeypatch):
        calls = []

        def flaky_costates(*args):
            calls.append(args)
            if len(calls) > 1:
                raise SingularCostateError(3)
            return costates(*args)

        monkeypatch.setattr("otflow.training.pmp.costates", flaky_costates)
        mu, nu, plan = dirac_instance
        result = train(translations(2), mu, nu, plan, TrainerConfig(beta=1e-6, rho0=10.0, max_iter=50))
        assert result.reason is TerminationReason.SINGULAR_COSTATE
        assert len(result.accepted_costs()) == 1
        assert result.cost == result.accepted_costs()[0] < result.initial_cost
        assert np.any(result.control.values != 0)


class TestConvergenceRule:
    """Test the relative-decrease stopping rule"""

    def test_needs_full_window(self):
        config = TrainerConfig(window=3, cost_tol=1e-3)
        assert not has_converged([1.0, 1.0, 1.0], config)

    def test_flat_window_converges(self):
        config = TrainerConfig(window=3, cost_tol=1e-3)
        assert has_converged([1.0, 0.99995, 0.9999, 0.99985], config)

    def test_progress_continues(self):
        config = TrainerConfig(window=3, cost_tol=1e-3)
        assert not has_converged([1.0, 0.9, 0.8, 0.7], config)


class TestGradientDescent:
    """Test the adjoint-gradient trainer"""

    def test_zero_gradient_returns_start(self):
        mu = build_measure([(0.1, 0.2), (-0.3, 0.0)])
        plan = CouplingPlan.identity(mu.weights)
        u0 = ControlSchedule.zeros(8, 14)
        result = gradient_descent_train(hermite2d(), mu, mu, plan, TrainerConfig(), u0=u0)
        assert result.control is u0
        assert result.reason is TerminationReason.ZERO_GRADIENT
        assert result.iterations == 0

    def test_translation_instance(self, dirac_instance):
        mu, nu, plan = dirac_instance
        field = translations(2)
        result = gradient_descent_train(field, mu, nu, plan, TrainerConfig(beta=1e-6, max_iter=200))
        assert result.method is TrainingMethod.GRADIENT_DESCENT
        assert terminal_cost(terminal_states(field, result.control, mu.atoms), nu, plan) <= 1e-3

    def test_accepted_steps_decrease(self, small_instance):
        mu, nu, plan = small_instance
        result = gradient_descent_train(hermite2d(), mu, nu, plan, TrainerConfig(beta=1e-3, max_iter=30), steps=8)
        costs = [result.initial_cost] + result.accepted_costs()
        assert all(b < a for a, b in zip(costs, costs[1:]))

    def test_singular_costates_keep_accepted_control(self, dirac_instance, monkeypatch):
        calls = []

        def flaky_cost_and_gradient(*args):
            calls.append(args)
            if len(calls) > 1:
                raise SingularCostateError(2)
            return cost_and_gradient(*args)

        monkeypatch.setattr("otflow.training.gradient.cost_and_gradient", flaky_cost_and_gradient)
        mu, nu, plan = dirac_instance
        result = gradient_descent_train(translations(2), mu, nu, plan, TrainerConfig(beta=1e-6, max_iter=200))
        assert result.reason is TerminationReason.SINGULAR_COSTATE
        assert len(result.accepted_costs()) == 1
        assert result.cost == result.accepted_costs()[0] < result.initial_cost
        assert result.control is calls[1][1]
