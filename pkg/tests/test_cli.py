import pytest
from click.testing import CliRunner

from cli.otflow_cli import cli, resolve_config
from otflow.core.errors import ConfigError
from otflow.io import read_json, read_measure_csv, read_table


class TestCLI:
    """Test CLI tool"""

    @pytest.fixture
    def runner(self):
        """Create CLI runner"""
        return CliRunner()

    @pytest.fixture
    def smoke_dir(self, runner, tmp_path):
        """Output directory with sampled smoke measures"""
        out = tmp_path / "smoke"
        result = runner.invoke(cli, ["sample", "--preset", "smoke", "--out", str(out)])
        assert result.exit_code == 0, result.output
        return out

    def test_cli_help(self, runner):
        """Test CLI help information"""
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        assert "otflow" in result.output
        for command in ("sample", "plan", "train", "eval", "geodesic", "gamma-study", "reproduce-paper"):
            assert command in result.output

    def test_cli_verbose_logging(self, runner):
        """Test CLI verbose logging"""
        result = runner.invoke(cli, ["--verbose", "--help"])
        assert result.exit_code == 0

    def test_cli_log_file(self, runner, tmp_path):
        """Test CLI log file"""
        log_file = tmp_path / "otflow.log"
        result = runner.invoke(cli, ["--log-file", str(log_file), "sample", "--preset", "smoke",
                                     "--out", str(tmp_path / "out")])
        assert result.exit_code == 0
        assert log_file.exists()

    def test_sample_command(self, smoke_dir):
        """Test sample command writes both measures"""
        mu = read_measure_csv(smoke_dir / "mu_N.csv")
        nu = read_measure_csv(smoke_dir / "nu_N.csv")
        assert mu.dim == nu.dim == 2
        assert nu.size == 20

    def test_pipeline(self, runner, smoke_dir):
        """Test sample, plan, train, eval and geodesic in sequence"""
        common = ["--preset", "smoke", "--out", str(smoke_dir)]

        result = runner.invoke(cli, ["plan", "--validate", *common])
        assert result.exit_code == 0, result.output
        assert (smoke_dir / "plan.csv").is_file()

        result = runner.invoke(cli, ["train", "--max-iter", "3", *common])
        assert result.exit_code == 0, result.output
        training = read_json(smoke_dir / "training.json")
        assert training["iterations"] <= 3
        assert "wall_time" not in training

        result = runner.invoke(cli, ["eval", *common])
        assert result.exit_code == 0, result.output
        report = read_json(smoke_dir / "eval.json")
        assert report["coupling_cost"] <= report["initial_w2_squared"]

        result = runner.invoke(cli, ["geodesic", *common])
        assert result.exit_code == 0, result.output
        rows = read_table(smoke_dir / "geodesic.csv")
        assert len(rows) == 5
        assert float(rows[0]["bound"]) == 0.0
        assert (smoke_dir / "prefix_curve.csv").is_file()

    def test_train_with_gradient_descent(self, runner, smoke_dir):
        """Test train command with --method gd"""
        common = ["--preset", "smoke", "--out", str(smoke_dir)]
        assert runner.invoke(cli, ["plan", *common]).exit_code == 0
        result = runner.invoke(cli, ["train", "--method", "gd", "--max-iter", "2", *common])
        assert result.exit_code == 0, result.output
        assert read_json(smoke_dir / "training.json")["method"] == "gd"

    def test_plan_without_samples_fails(self, runner, tmp_path):
        """Test failure path exits with status 1"""
        result = runner.invoke(cli, ["plan", "--preset", "smoke", "--out", str(tmp_path / "empty")])
        assert result.exit_code == 1
        assert "failed" in result.output

    def test_unknown_setting_fails(self, runner, tmp_path):
        """Test an unknown --set key is reported"""
        result = runner.invoke(cli, ["sample", "--preset", "smoke", "--set", "colour=red",
                                     "--out", str(tmp_path)])
        assert result.exit_code == 1
        assert "failed" in result.output

    def test_reproduce_paper_smoke(self, runner, tmp_path):
        """Test the full pipeline command on the smoke preset"""
        out = tmp_path / "repro"
        result = runner.invoke(cli, ["reproduce-paper", "--preset", "smoke", "--out", str(out)])
        assert result.exit_code == 0, result.output
        for name in ("mu_N.csv", "nu_N.csv", "plan.csv", "control.json", "run.json", "eval.json",
                     "comparison.svg", "timing.json"):
            assert (out / name).is_file(), name

    def test_gamma_study_command(self, runner, tmp_path):
        """Test the refinement study command"""
        out = tmp_path / "gamma"
        result = runner.invoke(cli, ["gamma-study", "--preset", "smoke", "--levels", "3",
                                     "--set", "spacing=0.3", "--set", "n_target=8", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert len(read_table(out / "gamma_study.csv")) == 3


class TestResolveConfig:
    """Test configuration precedence"""

    def test_preset_only(self):
        config = resolve_config("smoke", None, ())
        assert config.spacing == 0.25

    def test_file_then_set_then_flag(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("seed = 1\nspacing = 0.2\nbeta = 1e-3\n", encoding="utf-8")
        config = resolve_config("desk", str(path), ["seed=2", "beta=2e-3"], seed=3)
        assert config.spacing == 0.2
        assert config.beta == 2e-3
        assert config.seed == 3

    def test_none_flags_ignored(self):
        config = resolve_config("desk", None, ["steps=16"], seed=None, method=None)
        assert config.steps == 16
        assert config.seed == 0

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            resolve_config("desk", None, ["colour=red"])
