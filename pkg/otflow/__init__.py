"""
otflow - Optimal transport maps learned as flows of control-affine systems

Discrete optimal couplings from an exact transportation simplex, explicit Euler
flows of linear-control field families, and a proximal maximum-principle trainer
that steers every source atom towards its coupled targets at once.
"""

from .core.errors import (
    ConfigError,
    FlowBlowUpError,
    MeasureError,
    OTFlowError,
    SingularCostateError,
    StageError,
    TrainingStalled,
)
from .core.status import TerminationReason, TrainingMethod
from .dynamics import (
    ControlSchedule,
    FieldFamily,
    MonomialChannel,
    Trajectory,
    costate_backward,
    custom_family,
    flow_forward,
    flow_map,
    flow_prefix_map,
    growth_bound,
    hermite2d,
    hermite_nd,
    l2_norm,
    linear,
    lipschitz_bound,
    translations,
)
from .evaluation import (
    EvalReport,
    evaluate,
    geodesic_deviation,
    interpolated_pushforward,
    l2_map_error,
    prefix_curve_deviation,
)
from .experiment import (
    ExperimentConfig,
    ExperimentConfigPresets,
    disc_triangulation,
    gamma_convergence_study,
    run_experiment,
    sample_target,
    target_map,
)
from .registry.field_registry import (
    FieldRegistry,
    create_field,
    get_global_registry,
    get_registered_fields,
    is_field_registered,
    register_field,
    unregister_field,
)
from .training import (
    TrainerConfig,
    TrainerState,
    TrainingResult,
    adjoint_gradient,
    corrected_covector,
    cost_functional,
    gradient_descent_train,
    maximize_augmented_hamiltonian,
    minimizer_norm_bound,
    pmp_iteration,
    terminal_covector,
    train,
)
from .transport import (
    CouplingPlan,
    DiscreteMeasure,
    build_measure,
    pushforward,
    solve_optimal_plan,
    solve_transport,
    squared_cost,
    transport_cost,
    w2_distance,
)
from .utils.logger import LoggerConfig, OTFlowLogger, configure_logging, get_logger, get_otflow_logger
from .validators import (
    ValidationResult,
    print_validation_result,
    validate_control,
    validate_field_constants,
    validate_measure,
    validate_plan,
    validate_svg_structure,
)

__version__ = "0.1.0"


# Register all built-in field families
def _register_builtin_fields() -> None:
    """Register all built-in field families"""
    register_field("translations", translations, {"description": "constant unit fields e_i"}, is_builtin=True)
    register_field("linear", linear, {"description": "linear fields x_j e_i"}, is_builtin=True)
    register_field("hermite2d", hermite2d, {"description": "14 Gaussian-weighted planar monomials"}, is_builtin=True)
    register_field("hermiteNd", hermite_nd, {"description": "constant and Gaussian-weighted constant fields"}, is_builtin=True)


# Register field families when the module is imported
_register_builtin_fields()


__all__ = [
    # Errors and status
    "OTFlowError",
    "MeasureError",
    "ConfigError",
    "FlowBlowUpError",
    "SingularCostateError",
    "TrainingStalled",
    "StageError",
    "TerminationReason",
    "TrainingMethod",
    # Measures and transport
    "DiscreteMeasure",
    "CouplingPlan",
    "build_measure",
    "squared_cost",
    "pushforward",
    "solve_optimal_plan",
    "solve_transport",
    "transport_cost",
    "w2_distance",
    # Dynamics
    "FieldFamily",
    "MonomialChannel",
    "ControlSchedule",
    "Trajectory",
    "translations",
    "linear",
    "hermite2d",
    "hermite_nd",
    "custom_family",
    "flow_forward",
    "flow_map",
    "flow_prefix_map",
    "costate_backward",
    "growth_bound",
    "lipschitz_bound",
    "l2_norm",
    # Field registry
    "FieldRegistry",
    "register_field",
    "unregister_field",
    "create_field",
    "get_registered_fields",
    "is_field_registered",
    "get_global_registry",
    # Training
    "TrainerConfig",
    "TrainerState",
    "TrainingResult",
    "cost_functional",
    "terminal_covector",
    "corrected_covector",
    "maximize_augmented_hamiltonian",
    "adjoint_gradient",
    "minimizer_norm_bound",
    "pmp_iteration",
    "train",
    "gradient_descent_train",
    # Evaluation
    "EvalReport",
    "evaluate",
    "l2_map_error",
    "interpolated_pushforward",
    "geodesic_deviation",
    "prefix_curve_deviation",
    # Experiment
    "ExperimentConfig",
    "ExperimentConfigPresets",
    "disc_triangulation",
    "target_map",
    "sample_target",
    "run_experiment",
    "gamma_convergence_study",
    # Validation utilities
    "ValidationResult",
    "validate_measure",
    "validate_plan",
    "validate_control",
    "validate_field_constants",
    "validate_svg_structure",
    "print_validation_result",
    # Logger utilities
    "get_logger",
    "get_otflow_logger",
    "configure_logging",
    "OTFlowLogger",
    "LoggerConfig",
]
