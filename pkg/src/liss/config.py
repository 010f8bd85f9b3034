"""Experiment configuration: named presets plus a versioned key-value override file."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

import yaml


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "desk"
    # search space
    z: int = 4
    cap: int = 100
    k: int = 50
    epsilon: float = 0.20
    continual_growth: bool = True
    pool_cap: int = 400
    games_per_eval: int = 2
    # training self-play
    train_map: str = "basesworkers_24x24"
    train_iterations: int = 3
    train_games_per_iteration: Optional[int] = 1000
    train_seconds_per_iteration: Optional[float] = None
    # transfer / sample efficiency
    test_map: str = "nwr_9x8"
    transfer_iterations: int = 4
    transfer_game_budget: int = 4000
    exp2_seeds: tuple = (0, 1, 2, 3, 4)
    # identical-neighbour rate
    beta_programs: int = 20
    beta_neighbors: int = 200
    beta_maps: tuple = ("nwr_9x8", "lmo_16x8")
    beta_seeds: tuple = (0, 1, 2)
    beta_epsilon: float = 0.0

    def validate(self) -> "ExperimentConfig":
        if self.z < 1 or self.cap < self.z:
            raise ConfigError("need 1 <= z <= cap")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        for name in ("epsilon", "beta_epsilon"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.pool_cap < 1:
            raise ConfigError("pool_cap must be >= 1")
        if self.games_per_eval < 2 or self.games_per_eval % 2:
            raise ConfigError("games_per_eval must be a positive even number")
        if (self.train_games_per_iteration is None) == (self.train_seconds_per_iteration is None):
            raise ConfigError("set exactly one of train_games_per_iteration and train_seconds_per_iteration")
        if self.train_iterations < 1 or self.transfer_iterations < 1:
            raise ConfigError("iteration counts must be >= 1")
        if self.transfer_game_budget < self.transfer_iterations * self.games_per_eval:
            raise ConfigError("transfer_game_budget too small for one evaluation per iteration")
        if self.beta_programs < 1 or self.beta_neighbors < 1 or not self.beta_maps:
            raise ConfigError("beta settings must be positive and name at least one map")
        return self

    def snapshot(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


PRESETS = {
    "desk": ExperimentConfig(),
    "paper": ExperimentConfig(
        preset="paper",
        k=1000,
        z=4,
        epsilon=0.20,
        pool_cap=400,
        train_iterations=5,
        train_games_per_iteration=None,
        train_seconds_per_iteration=400.0,
        transfer_iterations=5,
        transfer_game_budget=100_000,
        exp2_seeds=tuple(range(30)),
        beta_programs=50,
        beta_neighbors=1000,
        beta_maps=("nwr_9x8", "lmo_16x8", "brr_24x24"),
        beta_seeds=(0,),
    ),
}


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def apply_overrides(base: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    clean = {}
    for key, value in overrides.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        default = getattr(base, key)
        if isinstance(default, tuple):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{key}: expected a list")
            value = tuple(value)
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{key}: expected true/false")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key}: expected a number")
            value = float(value)
        elif isinstance(default, int) and value is not None:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key}: expected an integer")
        clean[key] = value
    return replace(base, **clean).validate()


def load_config(path: str | Path, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Read a ``format: 1`` YAML document; a ``preset:`` key picks the base, other keys override it."""
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != 1:
        raise ConfigError("config document must be a mapping starting with 'format: 1'")
    doc = dict(doc)
    doc.pop("format")
    start = preset(doc.pop("preset")) if "preset" in doc else (base or PRESETS["desk"])
    return apply_overrides(start, doc)


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump({"format": 1, **cfg.snapshot()}, sort_keys=False)
