"""
otflow CLI Tool

Provides command-line tools for sampling the disc-to-target instance, solving the
coupling, training the control and evaluating the learned transport map.

Every command resolves its configuration as preset < --config file < --set
overrides < dedicated flags, and reads or writes artifacts under --out.
"""

import functools
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import click
from rich.console import Console
from rich.table import Table

# Add project root directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from otflow import (
    ExperimentConfig,
    ExperimentConfigPresets,
    configure_logging,
    create_field,
    evaluate,
    get_logger,
    solve_transport,
    validate_plan,
    print_validation_result,
)
from otflow.dynamics.flow import terminal_states
from otflow.evaluation.geodesic import geodesic_curve, prefix_curve_deviation
from otflow.experiment.config import apply_overrides, load_config_file
from otflow.experiment.runner import (
    GEODESIC_TIMES,
    build_instance,
    gamma_convergence_study,
    reference_measures,
    run_experiment,
    successive_gaps,
    train_instance,
    write_gamma_study,
)
from otflow.experiment.generators import TargetMap
from otflow.io.artifacts import (
    read_control,
    read_measure_csv,
    read_plan_csv,
    write_control,
    write_json,
    write_measure_csv,
    write_plan_csv,
    write_table,
)
from otflow.transport.distance import transport_cost
from otflow.transport.measure import DiscreteMeasure

console = Console()


def _common_options(command: Callable[..., Any]) -> Callable[..., Any]:
    """Configuration options shared by every command"""
    options = [
        click.option("--preset", "-p", type=click.Choice(["desk", "paper", "smoke"]), default="desk",
                     show_default=True, help="Base configuration"),
        click.option("--config", "-c", "config_file", type=click.Path(exists=True, dir_okay=False),
                     help="Key-value configuration file"),
        click.option("--set", "-s", "overrides", multiple=True, metavar="KEY=VALUE",
                     help="Override a setting (repeatable)"),
        click.option("--seed", type=int, help="Random seed"),
        click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _parse_sets(pairs: Sequence[str]) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise click.BadParameter(f"expected KEY=VALUE, got '{pair}'", param_hint="--set")
        values[key.strip()] = value.strip()
    return values


def resolve_config(
    preset: str,
    config_file: Optional[str],
    overrides: Sequence[str],
    **flags: Any,
) -> ExperimentConfig:
    """
    Build the effective configuration

    Args:
        preset: Name of the base preset
        config_file: Optional key-value file applied over the preset
        overrides: ``KEY=VALUE`` strings applied over the file
        **flags: Dedicated command-line flags; ``None`` values are ignored

    Returns:
        Effective configuration
    """
    config = ExperimentConfigPresets.get(preset)
    if config_file:
        config = apply_overrides(config, load_config_file(config_file))
    if overrides:
        config = apply_overrides(config, _parse_sets(overrides))
    dedicated = {key: str(value) for key, value in flags.items() if value is not None}
    if dedicated:
        config = apply_overrides(config, dedicated)
    return config


def _run_command(stage: str) -> Callable[[Callable[..., None]], Callable[..., None]]:
    """Log, echo and exit with status 1 when a command fails"""

    def decorator(func: Callable[..., None]) -> Callable[..., None]:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> None:
            logger = get_logger("otflow.cli")
            try:
                func(*args, **kwargs)
            except click.exceptions.Exit:
                raise
            except Exception as e:
                error_msg = f"{stage} failed: {e}"
                logger.error(error_msg)
                click.echo(error_msg, err=True)
                sys.exit(1)

        return wrapper

    return decorator


def _summary_table(title: str, rows: Sequence[Tuple[str, Any]]) -> None:
    table = Table(title=title)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for name, value in rows:
        text = f"{value:.6g}" if isinstance(value, float) else str(value)
        table.add_row(name, text)
    console.print(table)


def _require(out: Path, *names: str) -> None:
    missing = [name for name in names if not (out / name).exists()]
    if missing:
        raise FileNotFoundError(f"missing {', '.join(missing)} in {out}; run the earlier commands first")


def _load_pair(out: Path) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    _require(out, "mu_N.csv", "nu_N.csv")
    return read_measure_csv(out / "mu_N.csv"), read_measure_csv(out / "nu_N.csv")


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Verbose output")
@click.option("--log-file", help="Log file path")
def cli(verbose: bool, log_file: Optional[str]) -> None:
    """otflow - Optimal transport maps as flows of control systems"""
    configure_logging(verbose=verbose, log_file=log_file)
    get_logger("otflow.cli").debug("otflow CLI started")


@cli.command()
@_common_options
@_run_command("Sampling")
def sample(preset: str, config_file: Optional[str], overrides: Tuple[str, ...],
           seed: Optional[int], out: Optional[str]) -> None:
    """Sample the source triangulation and the target measure"""
    config = resolve_config(preset, config_file, overrides, seed=seed, output_dir=out)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    instance = build_instance(config)
    write_measure_csv(out_dir / "mu_N.csv", instance.mu)
    write_measure_csv(out_dir / "nu_N.csv", instance.nu)
    _summary_table("Sampled measures", [
        ("source atoms N1", instance.mu.size),
        ("target samples N2", instance.nu.size),
        ("output", str(out_dir)),
    ])


@cli.command()
@_common_options
@click.option("--validate", is_flag=True, help="Validate the coupling against its marginals")
@_run_command("Planning")
def plan(preset: str, config_file: Optional[str], overrides: Tuple[str, ...],
         seed: Optional[int], out: Optional[str], validate: bool) -> None:
    """Solve the discrete optimal coupling between the sampled measures"""
    config = resolve_config(preset, config_file, overrides, seed=seed, output_dir=out)
    out_dir = Path(config.output_dir)
    mu, nu = _load_pair(out_dir)

    solution = solve_transport(mu, nu)
    write_plan_csv(out_dir / "plan.csv", solution.plan)

    if validate:
        result = validate_plan(solution.plan, mu, nu)
        print_validation_result(result, "Coupling validation result")
        if not result.is_valid:
            sys.exit(1)

    _summary_table("Optimal coupling", [
        ("W2^2", solution.cost),
        ("support", solution.plan.support_size),
        ("pivots", solution.stats.pivots),
        ("marginal residual", solution.plan.marginal_residual(mu.weights, nu.weights)),
    ])


@cli.command()
@_common_options
@click.option("--method", "-m", type=click.Choice(["pmp", "gd"]), help="Training algorithm")
@click.option("--max-iter", type=int, help="Maximum number of outer iterations")
@_run_command("Training")
def train(preset: str, config_file: Optional[str], overrides: Tuple[str, ...], seed: Optional[int],
          out: Optional[str], method: Optional[str], max_iter: Optional[int]) -> None:
    """Train the control on the sampled measures and their coupling"""
    config = resolve_config(preset, config_file, overrides, seed=seed, output_dir=out,
                            method=method, **{"trainer.max_iter": max_iter})
    out_dir = Path(config.output_dir)
    mu, nu = _load_pair(out_dir)
    _require(out_dir, "plan.csv")
    coupling = read_plan_csv(out_dir / "plan.csv", mu.size, nu.size)
    field = create_field(config.field)

    result = train_instance(config, field, mu, nu, coupling)
    write_control(out_dir / "control.json", result.control)
    write_json(out_dir / "training.json", result.to_dict(include_timing=False))

    _summary_table("Training", [
        ("method", str(result.method)),
        ("termination", str(result.reason)),
        ("iterations", result.iterations),
        ("initial cost", result.initial_cost),
        ("final cost", result.cost),
        ("wall time [s]", result.wall_time),
    ])


@cli.command(name="eval")
@_common_options
@_run_command("Evaluation")
def eval_command(preset: str, config_file: Optional[str], overrides: Tuple[str, ...],
                 seed: Optional[int], out: Optional[str]) -> None:
    """Evaluate the trained control against the exact transport map"""
    config = resolve_config(preset, config_file, overrides, seed=seed, output_dir=out)
    out_dir = Path(config.output_dir)
    mu, nu = _load_pair(out_dir)
    _require(out_dir, "plan.csv", "control.json")
    coupling = read_plan_csv(out_dir / "plan.csv", mu.size, nu.size)
    control = read_control(out_dir / "control.json")
    field = create_field(config.field)

    refs = (None, None)
    if config.reference_factor > 0:
        refs = reference_measures(build_instance(config))
    report = evaluate(field, control, mu, nu, coupling, TargetMap(), *refs)
    record = report.to_dict()
    record["initial_w2_squared"] = transport_cost(coupling, mu, nu)
    write_json(out_dir / "eval.json", record)

    _summary_table("Evaluation", [
        ("W2(push, target)", report.w2_push_vs_target),
        ("coupling cost", report.coupling_cost),
        ("initial W2^2", record["initial_w2_squared"]),
        ("||u||", report.control_norm),
        ("Lipschitz bound", report.lipschitz_bound),
        ("L2 map error", report.l2_map_error),
    ])


@cli.command()
@_common_options
@_run_command("Geodesic diagnostics")
def geodesic(preset: str, config_file: Optional[str], overrides: Tuple[str, ...],
             seed: Optional[int], out: Optional[str]) -> None:
    """Trace the deviation of the learned interpolation from the exact geodesic"""
    config = resolve_config(preset, config_file, overrides, seed=seed, output_dir=out)
    out_dir = Path(config.output_dir)
    _require(out_dir, "mu_N.csv", "control.json")
    mu = read_measure_csv(out_dir / "mu_N.csv")
    control = read_control(out_dir / "control.json")
    field = create_field(config.field)

    exact = TargetMap().apply(mu.atoms)
    pushed = terminal_states(field, control, mu.atoms)
    curve = geodesic_curve(mu, pushed, exact, GEODESIC_TIMES)
    write_table(out_dir / "geodesic.csv", ["t", "bound", "actual"], curve)
    prefix = prefix_curve_deviation(field, control, mu, exact, GEODESIC_TIMES)
    write_table(out_dir / "prefix_curve.csv", ["t", "w2"], prefix)

    table = Table(title="Geodesic deviation")
    for column in ("t", "bound", "actual", "prefix flow"):
        table.add_column(column, justify="right")
    for (t, bound, actual), (_, w2) in zip(curve, prefix):
        table.add_row(f"{t:g}", f"{bound:.6g}", f"{actual:.6g}", f"{w2:.6g}")
    console.print(table)


@cli.command(name="gamma-study")
@_common_options
@click.option("--levels", type=int, help="Number of refinement levels (at least 3)")
@_run_command("Refinement study")
def gamma_study(preset: str, config_file: Optional[str], overrides: Tuple[str, ...],
                seed: Optional[int], out: Optional[str], levels: Optional[int]) -> None:
    """Minimum of the discrete functional along a refinement ladder"""
    config = resolve_config(preset, config_file, overrides, seed=seed, output_dir=out,
                            gamma_levels=levels)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = gamma_convergence_study(config)
    write_gamma_study(out_dir / "gamma_study.csv", rows)

    table = Table(title="Refinement study")
    for column in ("N1", "N2", "min cost", "gap"):
        table.add_column(column, justify="right")
    gaps = [""] + [f"{gap:.3e}" for gap in successive_gaps(rows)]
    for row, gap in zip(rows, gaps):
        table.add_row(str(row.n1), str(row.n2), f"{row.min_cost:.8g}", gap)
    console.print(table)


@cli.command(name="reproduce-paper")
@_common_options
@click.option("--desk", "scale", flag_value="desk", default=True, help="Scaled-down instance (default)")
@click.option("--paper", "scale", flag_value="paper", help="Full-size instance: spacing 0.04, 1500 samples")
@click.option("--method", "-m", type=click.Choice(["pmp", "gd"]), help="Training algorithm")
@click.option("--max-iter", type=int, help="Maximum number of outer iterations")
@_run_command("Reproduction")
def reproduce_paper(preset: str, config_file: Optional[str], overrides: Tuple[str, ...], seed: Optional[int],
                    out: Optional[str], scale: str, method: Optional[str], max_iter: Optional[int]) -> None:
    """Run the full disc-to-target pipeline and write every artifact"""
    base = "paper" if scale == "paper" else preset
    config = resolve_config(base, config_file, overrides, seed=seed, output_dir=out,
                            method=method, **{"trainer.max_iter": max_iter})

    summary = run_experiment(config)

    _summary_table("Reproduction", [
        ("source atoms N1", summary.n1),
        ("target samples N2", summary.n2),
        ("initial W2^2", summary.initial_w2_squared),
        ("final coupling cost", summary.report.coupling_cost),
        ("cost ratio", summary.cost_ratio),
        ("L2 map error", summary.report.l2_map_error),
        ("termination", str(summary.result.reason)),
        ("iterations", summary.result.iterations),
        ("output", str(summary.output_dir)),
    ])


def main() -> None:
    """Main function"""
    cli()


if __name__ == "__main__":
    main()
