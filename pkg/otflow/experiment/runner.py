"""
Experiment Runner - end-to-end disc-to-target pipeline

Stages: sample the source triangulation and the target, solve the optimal
coupling, train the control, evaluate, trace geodesic diagnostics, plot and
write artifacts. Every output except ``timing.json`` is a deterministic function
of the configuration.
"""

import math
from contextlib import contextmanager
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import StageError
from ..core.status import TrainingMethod
from ..dynamics.control import ControlSchedule
from ..dynamics.fields import FieldFamily
from ..dynamics.flow import terminal_states
from ..evaluation.geodesic import geodesic_curve, prefix_curve_deviation
from ..evaluation.report import EvalReport, evaluate
from ..io.artifacts import write_control, write_json, write_measure_csv, write_plan_csv, write_table
from ..registry.field_registry import create_field
from ..training.functional import terminal_cost
from ..training.gradient import gradient_descent_train
from ..training.pmp import TrainingResult, train
from ..transport.measure import DiscreteMeasure
from ..transport.plan import CouplingPlan
from ..transport.simplex import TransportSolution, solve_transport
from ..utils.logger import get_logger
from ..utils.timing import StageTimer
from .config import ExperimentConfig
from .generators import TargetMap, disc_triangulation, sample_target
from .rng import SplitMix64
from .svg import ScatterLayer, write_svg

logger = get_logger(__name__)

GEODESIC_TIMES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass
class ExperimentInstance:
    """Sampled measures and model of one configuration"""
    config: ExperimentConfig
    field: FieldFamily
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    target: TargetMap
    rng: SplitMix64


@dataclass
class ExperimentSummary:
    """What :func:`run_experiment` produced"""
    output_dir: Path
    n1: int
    n2: int
    initial_w2_squared: float
    result: TrainingResult
    report: EvalReport
    files: List[Path] = dataclass_field(default_factory=list)
    timing: Dict[str, Any] = dataclass_field(default_factory=dict)

    @property
    def cost_ratio(self) -> float:
        """Final coupling cost relative to the initial W2^2"""
        if self.initial_w2_squared <= 0:
            return 0.0
        return self.report.coupling_cost / self.initial_w2_squared

    def to_dict(self) -> Dict[str, Any]:
        return {
            "output_dir": str(self.output_dir),
            "n1": self.n1,
            "n2": self.n2,
            "initial_w2_squared": self.initial_w2_squared,
            "final_coupling_cost": self.report.coupling_cost,
            "cost_ratio": self.cost_ratio,
            "l2_map_error": self.report.l2_map_error,
            "termination_reason": str(self.result.reason),
            "iterations": self.result.iterations,
        }


@contextmanager
def _stage(timer: StageTimer, name: str) -> Iterator[None]:
    logger.info(f"Stage '{name}' started")
    try:
        with timer.stage(name) as metrics:
            yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage '{name}' failed: {e}")
        raise StageError(name, e) from e
    logger.info(f"Stage '{name}' finished in {metrics.duration:.2f}s")


def build_instance(config: ExperimentConfig) -> ExperimentInstance:
    """Source triangulation, target samples and field family of a configuration"""
    rng = SplitMix64(config.seed)
    target = TargetMap()
    mu = disc_triangulation(config.radius, config.spacing)
    nu = sample_target(config.radius, config.n_target, config.seed, target.Q, target.v, target.c, rng=rng)
    field = create_field(config.field)
    if field.dim != mu.dim:
        raise ValueError(f"Field family '{config.field}' acts on R^{field.dim}, the experiment is planar")
    return ExperimentInstance(config=config, field=field, mu=mu, nu=nu, target=target, rng=rng)


def reference_measures(instance: ExperimentInstance) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    """
    Finer stand-ins for the continuous source and target

    The source spacing shrinks by sqrt(factor) and the target sample count grows by
    ``factor``; target samples continue the instance's random stream.
    """
    config, target = instance.config, instance.target
    factor = config.reference_factor
    mu_ref = disc_triangulation(config.radius, config.spacing / math.sqrt(factor))
    nu_ref = sample_target(config.radius, config.n_target * factor, config.seed,
                           target.Q, target.v, target.c, rng=instance.rng)
    return mu_ref, nu_ref


def train_instance(
    config: ExperimentConfig,
    field: FieldFamily,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: CouplingPlan,
    u0: Optional[ControlSchedule] = None,
) -> TrainingResult:
    """Dispatch to the configured trainer"""
    if config.training_method is TrainingMethod.GRADIENT_DESCENT:
        return gradient_descent_train(field, mu, nu, plan, config.trainer, u0=u0, steps=config.steps)
    return train(field, mu, nu, plan, config.trainer, u0=u0, steps=config.steps)


def _solver_record(solution: TransportSolution) -> Dict[str, Any]:
    record = solution.stats.to_dict()
    record.pop("wall_time", None)
    record["support_size"] = solution.plan.support_size
    return record


def write_plots(
    out: Path, mu: DiscreteMeasure, nu: DiscreteMeasure, pushed: np.ndarray, exact: np.ndarray
) -> List[Path]:
    """Source, target, pushforward overlay and exact-vs-learned comparison"""
    return [
        write_svg(out / "source.svg", [ScatterLayer(mu.atoms, "#1f77b4", "source atoms")],
                  "Source measure"),
        write_svg(out / "target.svg", [ScatterLayer(nu.atoms, "#ff7f0e", "target samples")],
                  "Target samples"),
        write_svg(out / "pushforward.svg",
                  [ScatterLayer(nu.atoms, "#ff7f0e", "target samples", 1.5),
                   ScatterLayer(pushed, "#2ca02c", "flow pushforward")],
                  "Flow pushforward over target samples"),
        write_svg(out / "comparison.svg",
                  [ScatterLayer(exact, "#d62728", "exact map pushforward"),
                   ScatterLayer(pushed, "#2ca02c", "flow pushforward")],
                  "Exact map vs flow on source atoms"),
    ]


def run_experiment(config: ExperimentConfig) -> ExperimentSummary:
    """
    Run the full pipeline and write every artifact to ``config.output_dir``

    Returns:
        Summary of the run

    Raises:
        StageError: A stage failed; carries the stage name and the original error
    """
    out = Path(config.output_dir)
    timer = StageTimer()
    files: List[Path] = []
    logger.info(f"Running experiment {config!r} into {out}")

    with _stage(timer, "sample"):
        out.mkdir(parents=True, exist_ok=True)
        instance = build_instance(config)
        mu, nu, field = instance.mu, instance.nu, instance.field
        files += [write_measure_csv(out / "mu_N.csv", mu), write_measure_csv(out / "nu_N.csv", nu)]
        logger.info(f"Sampled N1={mu.size} source atoms and N2={nu.size} target samples")

    with _stage(timer, "plan"):
        solution = solve_transport(mu, nu)
        plan = solution.plan
        files.append(write_plan_csv(out / "plan.csv", plan))

    with _stage(timer, "train"):
        result = train_instance(config, field, mu, nu, plan)
        files.append(write_control(out / "control.json", result.control))

    with _stage(timer, "evaluate"):
        exact = instance.target.apply(mu.atoms)
        refs = reference_measures(instance) if config.reference_factor > 0 else (None, None)
        report = evaluate(field, result.control, mu, nu, plan, instance.target, *refs)
        eval_record = report.to_dict()
        eval_record["initial_w2_squared"] = solution.cost
        files.append(write_json(out / "eval.json", eval_record))

    with _stage(timer, "geodesic"):
        pushed = terminal_states(field, result.control, mu.atoms)
        curve = geodesic_curve(mu, pushed, exact, GEODESIC_TIMES)
        files.append(write_table(out / "geodesic.csv", ["t", "bound", "actual"], curve))
        prefix = prefix_curve_deviation(field, result.control, mu, exact, GEODESIC_TIMES)
        files.append(write_table(out / "prefix_curve.csv", ["t", "w2"], prefix))

    with _stage(timer, "plot"):
        files += write_plots(out, mu, nu, pushed, exact)

    with _stage(timer, "record"):
        config_record = config.to_dict()
        config_record.pop("output_dir")
        run_record = {
            "config": config_record,
            "field": {
                "descriptor": field.descriptor,
                "k": field.k,
                "lipschitz_constant": field.lipschitz_constant,
                "growth_constant": field.growth_constant,
            },
            "n1": mu.size,
            "n2": nu.size,
            "solver": _solver_record(solution),
            "training": result.to_dict(include_timing=False),
        }
        files.append(write_json(out / "run.json", run_record))

    timing = timer.get_report()
    timing["training_wall_time"] = result.wall_time
    timing["solver_wall_time"] = solution.stats.wall_time
    files.append(write_json(out / "timing.json", timing))

    summary = ExperimentSummary(
        output_dir=out, n1=mu.size, n2=nu.size, initial_w2_squared=solution.cost,
        result=result, report=report, files=files, timing=timing,
    )
    logger.info(
        f"Experiment finished: coupling cost {report.coupling_cost:.6g} "
        f"({100 * summary.cost_ratio:.2f}% of initial W2^2) in {timer.total_time:.1f}s"
    )
    return summary


@dataclass
class GammaLevel:
    """One row of the refinement study"""
    n1: int
    n2: int
    min_cost: float


def default_ladder(config: ExperimentConfig) -> List[Tuple[float, int]]:
    """
    (spacing, n_target) per level; atom counts double from level to level

    The configured instance is the third level, so the default four-level ladder
    has about a quarter, half, one and two times its atoms.
    """
    ladder = []
    for level in range(config.gamma_levels):
        factor = 2.0 ** (level - 2)
        ladder.append((config.spacing / math.sqrt(factor), max(1, int(round(config.n_target * factor)))))
    return ladder


def gamma_convergence_study(
    base: ExperimentConfig, levels: Optional[Sequence[Tuple[float, int]]] = None
) -> List[GammaLevel]:
    """
    Minimum of the discrete functional along a refinement ladder

    Args:
        base: Configuration shared by every level
        levels: (spacing, n_target) per level; :func:`default_ladder` if omitted

    Returns:
        One row per level, in ladder order

    Raises:
        ValueError: Fewer than three levels
    """
    ladder = list(levels) if levels is not None else default_ladder(base)
    if len(ladder) < 3:
        raise ValueError("A refinement study needs at least three levels")

    rows = []
    for spacing, n_target in ladder:
        config = ExperimentConfig.from_dict({**base.to_dict(), "spacing": spacing, "n_target": n_target})
        instance = build_instance(config)
        plan = solve_transport(instance.mu, instance.nu).plan
        result = train_instance(config, instance.field, instance.mu, instance.nu, plan)
        rows.append(GammaLevel(n1=instance.mu.size, n2=instance.nu.size, min_cost=result.cost))
        logger.info(f"Refinement level N1={instance.mu.size} N2={instance.nu.size}: min cost {result.cost:.8g}")
    return rows


def successive_gaps(rows: Sequence[GammaLevel]) -> List[float]:
    return [abs(b.min_cost - a.min_cost) for a, b in zip(rows, rows[1:])]


def write_gamma_study(path: Path, rows: Sequence[GammaLevel]) -> Path:
    return write_table(path, ["n1", "n2", "min_cost"], ([r.n1, r.n2, r.min_cost] for r in rows))


@dataclass
class BetaRow:
    """Trained costs for one regularization weight"""
    beta: float
    coupling_cost: float
    total_cost: float


def beta_sweep(base: ExperimentConfig, betas: Sequence[float]) -> List[BetaRow]:
    """Train the same instance for several beta; one row per beta"""
    instance = build_instance(base)
    plan = solve_transport(instance.mu, instance.nu).plan
    rows = []
    for beta in betas:
        config = ExperimentConfig.from_dict({**base.to_dict(), "trainer": base.trainer.replace(beta=beta).to_dict()})
        result = train_instance(config, instance.field, instance.mu, instance.nu, plan)
        z_final = terminal_states(instance.field, result.control, instance.mu.atoms)
        rows.append(BetaRow(beta=beta, coupling_cost=terminal_cost(z_final, instance.nu, plan), total_cost=result.cost))
    return rows
