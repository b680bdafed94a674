"""
Experiment module - disc-to-target reproduction, configuration and plots
"""

from .config import (
    ExperimentConfig,
    ExperimentConfigPresets,
    apply_overrides,
    load_config_file,
    parse_key_values,
)
from .generators import (
    DEFAULT_C,
    DEFAULT_Q,
    DEFAULT_V,
    TargetMap,
    disc_triangulation,
    sample_disc,
    sample_target,
    target_map,
)
from .rng import SplitMix64, splitmix64
from .runner import (
    BetaRow,
    ExperimentInstance,
    ExperimentSummary,
    GammaLevel,
    beta_sweep,
    build_instance,
    default_ladder,
    gamma_convergence_study,
    reference_measures,
    run_experiment,
    successive_gaps,
    train_instance,
    write_gamma_study,
    write_plots,
)
from .svg import ScatterLayer, count_markers, scatter_svg, write_svg

__all__ = [
    # Configuration
    "ExperimentConfig",
    "ExperimentConfigPresets",
    "apply_overrides",
    "load_config_file",
    "parse_key_values",
    # Generators
    "DEFAULT_Q",
    "DEFAULT_V",
    "DEFAULT_C",
    "TargetMap",
    "disc_triangulation",
    "sample_disc",
    "sample_target",
    "target_map",
    "SplitMix64",
    "splitmix64",
    # Pipeline
    "ExperimentInstance",
    "ExperimentSummary",
    "GammaLevel",
    "BetaRow",
    "build_instance",
    "reference_measures",
    "train_instance",
    "run_experiment",
    "default_ladder",
    "gamma_convergence_study",
    "successive_gaps",
    "write_gamma_study",
    "beta_sweep",
    "write_plots",
    # Plots
    "ScatterLayer",
    "scatter_svg",
    "write_svg",
    "count_markers",
]
