"""Run configuration: a single JSON document drives every command.

Unknown keys are rejected (anywhere in the document), so a typo never
silently falls back to a default. The architecture is either the name
"searched" or an inline per-module table in ArchitectureConfig JSON form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .nas.space import ArchitectureConfig, SearchSpace, searched_preset

ARCH_PRESETS = ("searched",)


def _check_keys(obj: dict, allowed: tuple, where: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {where} keys: {', '.join(unknown)}")


@dataclass(frozen=True)
class OptimizerConfig:
    lr: float = 3e-4
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8

    @staticmethod
    def from_json(obj: dict) -> "OptimizerConfig":
        _check_keys(obj, ("lr", "betas", "eps"), "optimizer")
        kwargs = dict(obj)
        if "betas" in kwargs:
            kwargs["betas"] = tuple(kwargs["betas"])
        return OptimizerConfig(**kwargs)

    def to_json(self) -> dict:
        return {"lr": self.lr, "betas": list(self.betas), "eps": self.eps}


@dataclass(frozen=True)
class LossWeights:
    adversarial: float = 0.0

    @staticmethod
    def from_json(obj: dict) -> "LossWeights":
        _check_keys(obj, ("adversarial",), "loss_weights")
        return LossWeights(**obj)

    def to_json(self) -> dict:
        return {"adversarial": self.adversarial}


@dataclass(frozen=True)
class NasConfig:
    budget: int = 8
    batch_size: int = 4
    gamma: float = 0.9
    lr: float = 0.2
    alpha: float | None = None
    beta: float | None = None
    candidate_epochs: int = 30
    include_kernel: bool = True

    @staticmethod
    def from_json(obj: dict) -> "NasConfig":
        _check_keys(obj, ("budget", "batch_size", "gamma", "lr", "alpha",
                          "beta", "candidate_epochs", "include_kernel"),
                    "nas")
        return NasConfig(**obj)

    def to_json(self) -> dict:
        return {"budget": self.budget, "batch_size": self.batch_size,
                "gamma": self.gamma, "lr": self.lr, "alpha": self.alpha,
                "beta": self.beta,
                "candidate_epochs": self.candidate_epochs,
                "include_kernel": self.include_kernel}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    corpus: str | None = None
    arch: str | dict = "searched"
    epochs: int = 1
    dropout: float = 0.1
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    loss_weights: LossWeights = field(default_factory=LossWeights)
    nas: NasConfig = field(default_factory=NasConfig)

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        self.architecture()  # validate eagerly

    def architecture(self) -> ArchitectureConfig:
        """Resolve the arch field to a concrete configuration."""
        if isinstance(self.arch, str):
            if self.arch not in ARCH_PRESETS:
                raise ConfigError(
                    f"unknown architecture preset {self.arch!r}; "
                    f"known: {', '.join(ARCH_PRESETS)}")
            return searched_preset()
        if isinstance(self.arch, dict):
            try:
                return ArchitectureConfig.from_json(self.arch)
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"bad inline architecture: {exc}") from exc
        raise ConfigError("arch must be a preset name or an inline table")

    def search_space(self) -> SearchSpace:
        return SearchSpace(include_kernel=self.nas.include_kernel)

    @staticmethod
    def from_json(obj: dict) -> "RunConfig":
        _check_keys(obj, ("seed", "corpus", "arch", "epochs", "dropout",
                          "optimizer", "loss_weights", "nas"), "config")
        kwargs = dict(obj)
        if "optimizer" in kwargs:
            kwargs["optimizer"] = OptimizerConfig.from_json(
                kwargs["optimizer"])
        if "loss_weights" in kwargs:
            kwargs["loss_weights"] = LossWeights.from_json(
                kwargs["loss_weights"])
        if "nas" in kwargs:
            kwargs["nas"] = NasConfig.from_json(kwargs["nas"])
        try:
            return RunConfig(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad config value: {exc}") from exc

    @staticmethod
    def from_file(path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        return RunConfig.from_json(obj)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "corpus": self.corpus,
            "arch": self.arch,
            "epochs": self.epochs,
            "dropout": self.dropout,
            "optimizer": self.optimizer.to_json(),
            "loss_weights": self.loss_weights.to_json(),
            "nas": self.nas.to_json(),
        }
