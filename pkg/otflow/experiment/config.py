"""
Experiment Configuration - settings of the disc-to-target reproduction

Provides the :class:`ExperimentConfig` dataclass, predefined presets and the
key-value file format used by the command line:

    # comment
    spacing = 0.08
    n_target = 400
    trainer.max_iter = 200

Keys are the ExperimentConfig field names, ``trainer.<field>`` for the nested
TrainerConfig and ``beta`` as a shorthand for ``trainer.beta``.
"""

from dataclasses import asdict, dataclass, field as dataclass_field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Union

from ..core.errors import ConfigError
from ..core.status import TrainingMethod
from ..registry.field_registry import is_field_registered, parse_descriptor
from ..training.config import TrainerConfig

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass
class ExperimentConfig:
    """
    Experiment configuration

    Attributes:
        field: Field family descriptor, e.g. ``hermite2d:zeta=10``
        radius: Disc radius of the source measure
        spacing: Triangulation spacing of the source measure
        n_target: Number of target samples
        seed: Seed of the single random stream
        steps: Number of Euler sub-intervals M
        method: ``pmp`` or ``gd``
        reference_factor: Refinement of the reference measures used in the error
            decomposition (atoms scale by this factor); 0 disables it
        gamma_levels: Number of refinement levels of the convergence study
        output_dir: Directory receiving all artifacts
        trainer: Trainer hyper-parameters
    """

    field: str = "hermite2d:zeta=10"
    radius: float = 0.5
    spacing: float = 0.08
    n_target: int = 400
    seed: int = 0
    steps: int = 32
    method: str = TrainingMethod.PMP.value
    reference_factor: int = 4
    gamma_levels: int = 4
    output_dir: str = "out"
    trainer: TrainerConfig = dataclass_field(default_factory=TrainerConfig)

    def __post_init__(self) -> None:
        errors = self.validate()
        if errors:
            raise ConfigError("Invalid experiment configuration: " + "; ".join(errors))

    @property
    def beta(self) -> float:
        return self.trainer.beta

    @property
    def training_method(self) -> TrainingMethod:
        return TrainingMethod(self.method)

    def validate(self) -> List[str]:
        """
        Validate configuration

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if self.radius <= 0:
            errors.append("radius must be positive")
        if self.spacing <= 0:
            errors.append("spacing must be positive")
        if self.n_target < 1:
            errors.append("n_target must be at least 1")
        if self.steps < 2:
            errors.append("steps must be at least 2")
        if self.method not in {m.value for m in TrainingMethod}:
            errors.append(f"method must be one of {', '.join(m.value for m in TrainingMethod)}")
        if self.reference_factor < 0:
            errors.append("reference_factor must be nonnegative")
        if self.gamma_levels < 3:
            errors.append("gamma_levels must be at least 3")
        try:
            name, _ = parse_descriptor(self.field)
            if not is_field_registered(name):
                errors.append(f"Unknown field family '{name}'")
        except ConfigError as e:
            errors.append(str(e))
        errors.extend(f"trainer: {e}" for e in self.trainer.validate())
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        data = dict(data)
        trainer = data.pop("trainer", {})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown experiment settings: {', '.join(sorted(unknown))}")
        if isinstance(trainer, Mapping):
            trainer = TrainerConfig.from_dict(dict(trainer))
        return cls(trainer=trainer, **data)

    def __repr__(self) -> str:
        return (
            f"ExperimentConfig(field='{self.field}', spacing={self.spacing:g}, "
            f"n_target={self.n_target}, M={self.steps}, beta={self.beta:g}, method={self.method})"
        )


# Predefined configurations
class ExperimentConfigPresets:
    """Predefined experiment configurations"""

    @staticmethod
    def desk() -> ExperimentConfig:
        """Scaled-down instance: spacing 0.08 (~140 atoms), 400 target samples"""
        return ExperimentConfig()

    @staticmethod
    def paper() -> ExperimentConfig:
        """Full-size instance: spacing 0.04 (~571 atoms), 1500 target samples"""
        return ExperimentConfig(spacing=0.04, n_target=1500)

    @staticmethod
    def smoke() -> ExperimentConfig:
        """Tiny instance for quick pipeline checks"""
        return ExperimentConfig(
            spacing=0.25, n_target=20, steps=8, reference_factor=0,
            trainer=TrainerConfig(max_iter=10),
        )

    @staticmethod
    def get(name: str) -> ExperimentConfig:
        presets = {"desk": ExperimentConfigPresets.desk, "paper": ExperimentConfigPresets.paper,
                   "smoke": ExperimentConfigPresets.smoke}
        if name not in presets:
            raise ConfigError(f"Unknown preset '{name}' (available: {', '.join(presets)})")
        return presets[name]()


def _coerce(key: str, text: str, current: Any) -> Any:
    text = text.strip()
    try:
        if isinstance(current, bool):
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(f"not a boolean: {text}")
        if isinstance(current, int):
            return int(text)
        if isinstance(current, float):
            return float(text)
    except ValueError as e:
        raise ConfigError(f"Invalid value for '{key}': {e}") from e
    return text


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, str]:
    """
    Parse ``key = value`` lines; ``#`` starts a comment

    Raises:
        ConfigError: Line without ``=``
    """
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source}:{number}: expected 'key = value', got '{raw.strip()}'")
        values[key.strip()] = value.strip()
    return values


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    return parse_key_values(text, str(path))


def apply_overrides(config: ExperimentConfig, overrides: Mapping[str, str]) -> ExperimentConfig:
    """
    New configuration with string overrides applied

    Raises:
        ConfigError: Unknown key, unparsable value or invalid result
    """
    experiment_changes: Dict[str, Any] = {}
    trainer_changes: Dict[str, Any] = {}
    trainer_fields = {f.name for f in fields(TrainerConfig)}
    experiment_fields = {f.name for f in fields(ExperimentConfig)} - {"trainer"}

    for key, text in overrides.items():
        name = "trainer.beta" if key == "beta" else key
        if name.startswith("trainer."):
            sub = name[len("trainer."):]
            if sub not in trainer_fields:
                raise ConfigError(f"Unknown trainer setting '{sub}'")
            trainer_changes[sub] = _coerce(key, text, getattr(config.trainer, sub))
        elif name in experiment_fields:
            experiment_changes[name] = _coerce(key, text, getattr(config, name))
        else:
            raise ConfigError(f"Unknown setting '{key}'")

    trainer = config.trainer.replace(**trainer_changes) if trainer_changes else config.trainer
    return replace(config, trainer=trainer, **experiment_changes)
