"""Pipeline configuration: JSON file plus --set key=value overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from emopack.augment import AugmentConfig
from emopack.errors import ConfigError
from emopack.features import SpecAugmentConfig


@dataclass
class PipelineConfig:
    manifests: list[str] = field(default_factory=list)
    mapping: str | None = None  # None -> shipped default mapping
    audio_root: str | None = None
    smoothing: bool = True
    train_fraction: float = 0.95
    split_seed: int | None = None  # None -> the global seed
    context_s: float = 30.0
    fill_fraction: float = 0.8
    refresh_threshold: int = 1
    n_sequences: int | None = None  # None -> enough to cover the train split once
    w_d: float = 0.01
    tau: float = 1.0
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    spec_augment: SpecAugmentConfig = field(default_factory=SpecAugmentConfig)
    out_dir: str = "out"
    workers: int = 1
    seed: int = 0

    def validate(self) -> None:
        if not (0.0 < self.train_fraction < 1.0):
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if not (0.0 < self.fill_fraction <= 1.0):
            raise ConfigError(f"fill_fraction must be in (0, 1], got {self.fill_fraction}")
        if self.context_s <= 0:
            raise ConfigError(f"context_s must be positive, got {self.context_s}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.refresh_threshold < 1:
            raise ConfigError(f"refresh_threshold must be >= 1, got {self.refresh_threshold}")
        for path in self.manifests:
            if not Path(path).is_file():
                raise ConfigError(f"manifest not found: {path}")
        if self.mapping is not None and not Path(self.mapping).is_file():
            raise ConfigError(f"mapping file not found: {self.mapping}")


def _coerce(raw: dict) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    kwargs = dict(raw)
    if "augment" in kwargs and isinstance(kwargs["augment"], dict):
        kwargs["augment"] = AugmentConfig.from_dict(kwargs["augment"])
    if "spec_augment" in kwargs and isinstance(kwargs["spec_augment"], dict):
        kwargs["spec_augment"] = SpecAugmentConfig.from_dict(kwargs["spec_augment"])
    return PipelineConfig(**kwargs)


def load_config(path: str | Path | None, overrides: list[str] | None = None) -> PipelineConfig:
    """Read the JSON config (if any) and apply dotted --set overrides."""
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value  # bare strings are fine
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set {key}: {part} is not a nested section")
        node[parts[-1]] = parsed
    return _coerce(raw)
