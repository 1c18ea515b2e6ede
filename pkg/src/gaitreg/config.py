"""Flat run configuration: one JSON file drives the whole pipeline.

Every stochastic choice is pinned by an explicit seed in the config (no
wall-clock defaults), so rerunning a config byte-reproduces all outputs.
Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

from .data import LocomotionMode
from .errors import ConfigError
from .mlp import TrainConfig
from .synth import DEFAULT_TRIALS_PER_MODE, SynthConfig


def _default_trials() -> dict:
    return {mode.name: count for mode, count in DEFAULT_TRIALS_PER_MODE.items()}


@dataclass(frozen=True)
class RunConfig:
    # synthetic data
    seed: int = 20240
    trials_per_mode: dict = field(default_factory=_default_trials)
    samples_per_trial: int = 122
    noise_std_deg: float = 0.25
    speed_jitter: float = 0.05
    linear_mode: bool = False
    # preprocessing
    filter_order: int = 4
    cutoff_hz: float = 6.0
    filter_targets: bool = True
    paper_faithful_norm: bool = False
    # shared network
    layer_dims: tuple = (6, 100, 100, 100, 2)
    epochs: int = 30
    learning_rate: float = 1e-4
    momentum: float = 0.9
    l2_penalty: float = 1e-2
    batch_size: int = 16
    init_seed: int = 4183
    shuffle_seed: int = 7140
    # SVR baseline; the svr_grid_* lists, when set, trigger a pre-run grid
    # search over trial-level folds and override the scalar values
    svr_c: float = 10.0
    svr_epsilon: float = 0.01
    svr_gamma: Optional[float] = None  # None -> 1 / n_features
    svr_tol: float = 1e-3
    svr_max_updates: int = 100_000
    svr_grid_c: Optional[list] = None
    svr_grid_epsilon: Optional[list] = None
    svr_grid_gamma: Optional[list] = None
    svr_grid_folds: int = 3
    # evaluation
    phase_bins: int = 101

    def __post_init__(self):
        trials = dict(self.trials_per_mode)
        for name in trials:
            if name not in LocomotionMode.__members__:
                raise ConfigError(f"trials_per_mode key {name!r} is not a locomotion mode")
        object.__setattr__(self, "trials_per_mode", trials)
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        if self.phase_bins < 2:
            raise ConfigError(f"phase_bins must be >= 2, got {self.phase_bins}")
        grids = (self.svr_grid_c, self.svr_grid_epsilon, self.svr_grid_gamma)
        if any(g is not None for g in grids) and not all(g for g in grids):
            raise ConfigError(
                "svr_grid_c, svr_grid_epsilon, and svr_grid_gamma must be set "
                "together as non-empty lists"
            )
        # delegate range checks to the dataclasses that use the values
        self.synth_config()
        self.train_config()

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, overrides: dict[str, Any]) -> "RunConfig":
        merged = self.to_dict()
        merged.update(overrides)
        return RunConfig.from_dict(merged)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            elif isinstance(value, dict):
                value = dict(value)
            out[f.name] = value
        return out

    def synth_config(self) -> SynthConfig:
        return SynthConfig(
            seed=self.seed,
            trials_per_mode={
                LocomotionMode[name]: count for name, count in self.trials_per_mode.items()
            },
            samples_per_trial=self.samples_per_trial,
            noise_std_deg=self.noise_std_deg,
            speed_jitter=self.speed_jitter,
            linear_mode=self.linear_mode,
        )

    def train_config(self, shuffle_seed: Optional[int] = None) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            l2_penalty=self.l2_penalty,
            batch_size=self.batch_size,
            shuffle_seed=self.shuffle_seed if shuffle_seed is None else shuffle_seed,
        )
