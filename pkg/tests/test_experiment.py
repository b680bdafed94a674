import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from otflow.core.errors import ConfigError, StageError
from otflow.experiment import (
    ExperimentConfig,
    ExperimentConfigPresets,
    ScatterLayer,
    SplitMix64,
    TargetMap,
    apply_overrides,
    count_markers,
    default_ladder,
    disc_triangulation,
    gamma_convergence_study,
    load_config_file,
    parse_key_values,
    run_experiment,
    scatter_svg,
    sample_target,
    splitmix64,
    successive_gaps,
    target_map,
    write_gamma_study,
    write_svg,
)
from otflow.io import read_json, read_table
from otflow.validators import validate_svg_structure

DETERMINISTIC_ARTIFACTS = [
    "mu_N.csv",
    "nu_N.csv",
    "plan.csv",
    "control.json",
    "eval.json",
    "geodesic.csv",
    "prefix_curve.csv",
    "run.json",
    "source.svg",
    "target.svg",
    "pushforward.svg",
    "comparison.svg",
]


def smoke_config(out: Path, **changes) -> ExperimentConfig:
    return replace(ExperimentConfigPresets.smoke(), output_dir=str(out), **changes)


class TestSplitMix64:
    """Test the counter-based generator"""

    def test_first_output_seed_zero(self):
        assert int(splitmix64(0, 0, 1)[0]) == 0xE220A8397B1DCDAF

    def test_sequential_view_matches_counter(self):
        rng = SplitMix64(7)
        first = rng.next_uint64(3)
        second = rng.next_uint64(2)
        assert np.array_equal(np.concatenate([first, second]), splitmix64(7, 0, 5))
        assert rng.state() == (7, 5)

    def test_uniform_range(self):
        values = SplitMix64(1).uniform(1000)
        assert values.min() >= 0.0
        assert values.max() < 1.0
        assert abs(values.mean() - 0.5) < 0.05

    def test_uniform_disc(self):
        rng = SplitMix64(3)
        points = rng.uniform_disc(0.5, 200)
        assert points.shape == (200, 2)
        assert np.all(np.einsum("ij,ij->i", points, points) <= 0.25)

    def test_uniform_disc_continues_stream(self):
        # Two draws in sequence equal one combined draw
        a = SplitMix64(5)
        combined = a.uniform_disc(1.0, 30)
        b = SplitMix64(5)
        split = np.vstack([b.uniform_disc(1.0, 10), b.uniform_disc(1.0, 20)])
        assert np.array_equal(combined, split)
        assert a.position == b.position


class TestDiscTriangulation:
    """Test the source lattice"""

    def test_paper_scale_count(self):
        mu = disc_triangulation(0.5, 0.04)
        assert 540 <= mu.size <= 600

    def test_coarse_spacing_single_origin_atom(self):
        mu = disc_triangulation(0.5, 1.0)
        assert mu.atoms.tolist() == [[0.0, 0.0]]
        assert mu.weights.tolist() == [1.0]

    def test_atoms_inside_disc(self):
        mu = disc_triangulation(0.5, 0.08)
        assert np.all(np.linalg.norm(mu.atoms, axis=1) <= 0.5 + 1e-9)
        assert np.all(mu.weights == mu.weights[0])

    def test_symmetric_about_origin(self):
        atoms = disc_triangulation(0.5, 0.1).atoms
        assert sorted(map(tuple, np.round(-atoms, 12))) == sorted(map(tuple, np.round(atoms, 12)))

    @pytest.mark.parametrize("radius, spacing", [(0.0, 0.1), (0.5, 0.0), (-1.0, 0.1)])
    def test_invalid_inputs(self, radius, spacing):
        with pytest.raises(ConfigError):
            disc_triangulation(radius, spacing)


class TestTargetMap:
    """Test the analytic target map"""

    def test_center_maps_to_origin(self):
        assert target_map([0.5, 0.5]).tolist() == [0.0, 0.0]

    def test_identity_matrix(self):
        image = target_map([1.5, 0.5], Q=[[1, 0], [0, 1]], c=2.0)
        assert image == pytest.approx([1 / math.sqrt(3), 0.0])

    def test_non_positive_radicand(self):
        with pytest.raises(ValueError):
            target_map([0.5, 0.5], c=-1.0)
        with pytest.raises(ValueError):
            TargetMap(c=-1.0).apply(np.array([[0.5, 0.5]]))

    def test_apply_matches_call(self):
        tmap = TargetMap()
        points = disc_triangulation(0.5, 0.2).atoms
        expected = np.array([tmap(x) for x in points])
        assert tmap.apply(points) == pytest.approx(expected, abs=1e-15)


class TestSampleTarget:
    """Test target sampling"""

    def test_single_sample(self):
        nu = sample_target(0.5, 1, seed=9)
        assert nu.size == 1
        assert nu.weights.tolist() == [1.0]

    def test_same_seed_same_measure(self):
        assert sample_target(0.5, 50, seed=4).same_as(sample_target(0.5, 50, seed=4))

    def test_different_seed_different_measure(self):
        assert not sample_target(0.5, 50, seed=4).same_as(sample_target(0.5, 50, seed=5))

    def test_mean_matches_grid_quadrature(self):
        radius = 0.5
        centers = (np.arange(200) + 0.5) / 200 * 2 * radius - radius
        gx, gy = np.meshgrid(centers, centers)
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        inside = grid[np.einsum("ij,ij->i", grid, grid) <= radius ** 2]
        expected = TargetMap().apply(inside).mean(axis=0)

        nu = sample_target(radius, 1500, seed=0)
        assert np.all(np.abs(nu.mean - expected) <= 0.05)

    def test_invalid_count(self):
        with pytest.raises(ConfigError):
            sample_target(0.5, 0, seed=0)


class TestExperimentConfig:
    """Test experiment configuration"""

    def test_presets(self):
        desk = ExperimentConfigPresets.get("desk")
        paper = ExperimentConfigPresets.get("paper")
        assert (desk.spacing, desk.n_target, desk.steps, desk.beta) == (0.08, 400, 32, 5e-4)
        assert (paper.spacing, paper.n_target) == (0.04, 1500)
        assert desk.field == "hermite2d:zeta=10"

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            ExperimentConfigPresets.get("huge")

    @pytest.mark.parametrize(
        "changes",
        [{"radius": 0.0}, {"spacing": -0.1}, {"n_target": 0}, {"steps": 1}, {"method": "adam"},
         {"field": "nonexistent"}, {"gamma_levels": 2}],
    )
    def test_invalid_settings(self, changes):
        with pytest.raises(ConfigError):
            ExperimentConfig(**changes)

    def test_parse_key_values(self):
        text = "# desk overrides\nspacing = 0.1  # coarser\n\nbeta=1e-3\ntrainer.rho_reset = yes\n"
        assert parse_key_values(text) == {"spacing": "0.1", "beta": "1e-3", "trainer.rho_reset": "yes"}

    def test_parse_missing_separator(self):
        with pytest.raises(ConfigError, match=":2:"):
            parse_key_values("seed = 1\nspacing 0.1\n")

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "desk.conf"
        path.write_text("n_target = 50\n", encoding="utf-8")
        assert load_config_file(path) == {"n_target": "50"}
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "missing.conf")

    def test_apply_overrides(self):
        base = ExperimentConfigPresets.desk()
        config = apply_overrides(base, {"beta": "1e-3", "steps": "16", "trainer.rho_reset": "true",
                                        "field": "hermite2d:zeta=5"})
        assert config.beta == 1e-3
        assert config.steps == 16
        assert config.trainer.rho_reset is True
        assert config.field == "hermite2d:zeta=5"
        assert base.beta == 5e-4

    @pytest.mark.parametrize(
        "overrides",
        [{"colour": "red"}, {"trainer.momentum": "0.9"}, {"steps": "many"}, {"trainer.rho_reset": "maybe"},
         {"steps": "1"}],
    )
    def test_rejected_overrides(self, overrides):
        with pytest.raises(ConfigError):
            apply_overrides(ExperimentConfigPresets.desk(), overrides)

    def test_dict_round_trip(self):
        config = apply_overrides(ExperimentConfigPresets.desk(), {"beta": "2e-4", "seed": "3"})
        assert ExperimentConfig.from_dict(config.to_dict()) == config

    def test_from_dict_unknown_key(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"spacing": 0.1, "colour": "red"})


class TestSvg:
    """Test scatter plot output"""

    def test_one_marker_per_point(self, tmp_path):
        layers = [ScatterLayer(np.zeros((3, 2)), "#000000", "a"),
                  ScatterLayer(np.arange(10.0).reshape(5, 2), "#ff0000", "b")]
        path = write_svg(tmp_path / "plot.svg", layers, "Two layers")
        assert count_markers(path) == [3, 5]
        content = path.read_text(encoding="utf-8")
        assert validate_svg_structure(content, expected_markers=8).is_valid
        assert not validate_svg_structure(content, expected_markers=7).is_valid

    def test_legend_uses_no_circles(self, tmp_path):
        layers = [ScatterLayer(np.zeros((3, 2)), "#000000", "a"),
                  ScatterLayer(np.ones((2, 2)), "#ff0000", "b")]
        root = scatter_svg(layers, "Legend")
        assert len(root.xpath("//*[local-name()='circle']")) == 5
        swatches = [r for r in root.xpath("*[local-name()='rect']") if r.get("fill") != "none"]
        assert [r.get("fill") for r in swatches] == ["#000000", "#ff0000"]

    def test_stray_circle_warns(self):
        content = ('<svg xmlns="http://www.w3.org/2000/svg"><g><circle r="1"/></g>'
                   '<circle r="4"/></svg>')
        result = validate_svg_structure(content, expected_markers=2)
        assert result.is_valid
        assert result.warnings
        assert not validate_svg_structure(content, expected_markers=1).is_valid

    def test_invalid_xml(self):
        result = validate_svg_structure("<svg><g></svg>")
        assert not result.is_valid


class TestRunExperiment:
    """Test the end-to-end pipeline on the smoke preset"""

    def test_artifacts_written(self, tmp_path):
        summary = run_experiment(smoke_config(tmp_path / "run"))
        out = tmp_path / "run"
        for name in DETERMINISTIC_ARTIFACTS + ["timing.json"]:
            assert (out / name).is_file(), name
        assert len(read_table(out / "mu_N.csv")) == summary.n1
        assert len(read_table(out / "nu_N.csv")) == summary.n2 == 20
        assert [row["t"] for row in read_table(out / "geodesic.csv")] == ["0.0", "0.25", "0.5", "0.75", "1.0"]
        assert count_markers(out / "source.svg") == [summary.n1]
        assert count_markers(out / "pushforward.svg") == [summary.n2, summary.n1]

        record = read_json(out / "run.json")
        assert record["n1"] == summary.n1
        assert record["field"]["descriptor"] == "hermite2d:zeta=10"
        assert "wall_time" not in record["training"]
        assert "wall_time" not in record["solver"]

        report = read_json(out / "eval.json")
        assert report["initial_w2_squared"] == summary.initial_w2_squared
        assert report["coupling_cost"] <= summary.initial_w2_squared
        assert report["w2_push_vs_target"] ** 2 <= report["coupling_cost"] + 1e-9

    def test_rerun_is_bit_identical(self, tmp_path):
        run_experiment(smoke_config(tmp_path / "a"))
        run_experiment(smoke_config(tmp_path / "b"))
        for name in DETERMINISTIC_ARTIFACTS:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name

    def test_zero_iterations_evaluates_zero_control(self, tmp_path):
        config = smoke_config(tmp_path, trainer=ExperimentConfigPresets.smoke().trainer.replace(max_iter=0))
        summary = run_experiment(config)
        assert summary.result.iterations == 0
        assert summary.report.control_norm == 0.0
        assert summary.report.coupling_cost == pytest.approx(summary.initial_w2_squared, abs=1e-12)

    def test_gradient_descent_method(self, tmp_path):
        summary = run_experiment(smoke_config(tmp_path, method="gd"))
        assert str(summary.result.method) == "gd"

    def test_stage_failure_names_stage(self, tmp_path):
        with pytest.raises(StageError) as excinfo:
            run_experiment(smoke_config(tmp_path, field="linear:dim=1"))
        assert excinfo.value.stage == "sample"


class TestGammaStudy:
    """Test the refinement study"""

    def test_default_ladder(self):
        ladder = default_ladder(ExperimentConfigPresets.desk())
        assert [n for _, n in ladder] == [100, 200, 400, 800]
        assert ladder[2][0] == pytest.approx(0.08)
        assert ladder[0][0] == pytest.approx(0.16)

    def test_three_levels_monotone(self, tmp_path):
        rows = gamma_convergence_study(smoke_config(tmp_path), [(0.4, 10), (0.25, 20), (0.15, 30)])
        assert len(rows) == 3
        assert rows[0].n1 < rows[1].n1 < rows[2].n1
        assert [r.n2 for r in rows] == [10, 20, 30]
        path = write_gamma_study(tmp_path / "gamma.csv", rows)
        assert len(read_table(path)) == 3

    def test_identical_levels(self, tmp_path):
        rows = gamma_convergence_study(smoke_config(tmp_path), [(0.3, 12)] * 3)
        assert rows[0].min_cost == rows[1].min_cost == rows[2].min_cost
        assert successive_gaps(rows) == [0.0, 0.0]

    def test_too_few_levels(self, tmp_path):
        with pytest.raises(ValueError):
            gamma_convergence_study(smoke_config(tmp_path), [(0.3, 12), (0.2, 20)])


@pytest.mark.slow
class TestDeskReproduction:
    """Desk-scale acceptance runs"""

    def test_desk_cost_ratio(self, tmp_path):
        config = replace(ExperimentConfigPresets.desk(), output_dir=str(tmp_path), reference_factor=0)
        summary = run_experiment(config)
        assert summary.report.coupling_cost <= 0.1 * summary.initial_w2_squared
        assert summary.report.l2_map_error <= 0.15
        for row in read_table(tmp_path / "geodesic.csv"):
            assert float(row["actual"]) <= float(row["bound"]) + 1e-9

    def test_default_ladder_gaps_shrink(self, tmp_path):
        rows = gamma_convergence_study(replace(ExperimentConfigPresets.desk(), output_dir=str(tmp_path)))
        gaps = successive_gaps(rows)
        assert gaps[-1] <= gaps[0]
