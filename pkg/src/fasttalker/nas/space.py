"""Discrete architecture search space over the seven searchable modules."""

from dataclasses import dataclass, field

from ..errors import SearchError

MODULE_NAMES = (
    "phoneme_encoder",
    "duration_pred",
    "energy_pred",
    "pitch_pred",
    "semantic_translator",
    "waveform_decoder",
    "gesture_latent_decoder",
)

HYPERPARAMETERS = ("channels", "layers", "groups", "kernel")


@dataclass(frozen=True)
class ModuleChoice:
    """Chosen hyperparameters for one module."""

    channels: int
    layers: int
    groups: int
    kernel: int = 3

    def __post_init__(self):
        if self.channels % self.groups != 0:
            raise SearchError(
                f"channels {self.channels} not divisible by groups "
                f"{self.groups}")
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise SearchError(f"kernel must be positive odd, got {self.kernel}")
        if self.layers < 0:
            raise SearchError(f"layers must be >= 0, got {self.layers}")


@dataclass(frozen=True)
class ArchitectureConfig:
    """One ModuleChoice per searchable module, keyed by MODULE_NAMES order."""

    choices: tuple  # of ModuleChoice, len == len(MODULE_NAMES)

    def __post_init__(self):
        if len(self.choices) != len(MODULE_NAMES):
            raise SearchError(
                f"expected {len(MODULE_NAMES)} module choices, "
                f"got {len(self.choices)}")

    def __getitem__(self, name: str) -> ModuleChoice:
        return self.choices[MODULE_NAMES.index(name)]

    def to_json(self) -> dict:
        return {name: {h: getattr(c, h) for h in HYPERPARAMETERS}
                for name, c in zip(MODULE_NAMES, self.choices)}

    @staticmethod
    def from_json(obj: dict) -> "ArchitectureConfig":
        return ArchitectureConfig(tuple(
            ModuleChoice(**obj[name]) for name in MODULE_NAMES))


@dataclass(frozen=True)
class SearchSpace:
    """Choice lists per hyperparameter; each list has exactly 4 entries."""

    channels: tuple = (32, 64, 128, 256)
    layers: tuple = (0, 2, 4, 8)
    groups: tuple = (1, 2, 4, 8)
    kernel: tuple = (1, 3, 5, 7)
    include_kernel: bool = True
    modules: tuple = field(default=MODULE_NAMES)

    def __post_init__(self):
        for name in HYPERPARAMETERS:
            if len(getattr(self, name)) != 4:
                raise SearchError(f"{name} must list exactly 4 choices")

    @property
    def active_hyperparameters(self) -> tuple:
        return HYPERPARAMETERS if self.include_kernel else HYPERPARAMETERS[:3]

    @property
    def decode_length(self) -> int:
        """Total sequential decisions = modules x active hyperparameters."""
        return len(self.modules) * len(self.active_hyperparameters)

    def choice_values(self, hyperparameter: str) -> tuple:
        return getattr(self, hyperparameter)

    def decision_schedule(self) -> list:
        """(module, hyperparameter) pairs in decode order."""
        return [(m, h) for m in self.modules
                for h in self.active_hyperparameters]

    def config_from_indices(self, indices) -> ArchitectureConfig:
        """Build a config from one choice index (0..3) per decision."""
        schedule = self.decision_schedule()
        if len(indices) != len(schedule):
            raise SearchError(
                f"expected {len(schedule)} decisions, got {len(indices)}")
        per_module = {m: {} for m in self.modules}
        for (module, hyper), idx in zip(schedule, indices):
            per_module[module][hyper] = self.choice_values(hyper)[idx]
        return ArchitectureConfig(tuple(
            ModuleChoice(**per_module[m]) for m in self.modules))


def searched_preset() -> ArchitectureConfig:
    """The reference searched configuration used by defaults and tests."""
    layers = (8, 4, 2, 4, 0, 8, 0)
    channels = (256, 32, 64, 32, 64, 128, 128)
    groups = (4, 1, 1, 1, 8, 1, 4)
    return ArchitectureConfig(tuple(
        ModuleChoice(channels=c, layers=l, groups=g, kernel=3)
        for c, l, g in zip(channels, layers, groups)))
