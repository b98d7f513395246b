"""Training configuration: defaults, flat key=value files, environment overrides."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

from ..errors import ConfigError
from ..nn.layers import POOLING_MODES
from ..nn.spectral import WEIGHT_TRANSFORMS
from ..sampler import SamplingStrategy

SEED_ENV = "ETHPHISH_SEED"


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    folds: int = 5
    repeats: int = 5
    hidden: int = 128
    cheb_order: int = 3
    pooling: str = "average"
    lr: float = 1e-3
    rank: str = "t"
    weight: str = "t"
    hops: int = 2
    direction: str = "undirected"
    amount_transform: str = "log1p"
    standardize: bool = True
    threshold: float = 0.5
    seed: int = 0

    def __post_init__(self):
        for name in ("epochs", "batch_size", "repeats", "hidden", "cheb_order", "hops"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.pooling not in POOLING_MODES:
            raise ConfigError(f"pooling must be one of {POOLING_MODES}")
        if self.amount_transform not in WEIGHT_TRANSFORMS:
            raise ConfigError(f"amount_transform must be one of {WEIGHT_TRANSFORMS}")
        if self.lr < 0:
            raise ConfigError("lr must be non-negative")
        self.strategy  # validates rank/weight/direction

    @property
    def strategy(self) -> SamplingStrategy:
        return SamplingStrategy(self.rank, self.weight, self.hops, self.direction)

    def replace(self, **changes) -> "TrainConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_TYPES = {f.name: f.type for f in fields(TrainConfig)}


def _coerce(key: str, raw: str):
    kind = _TYPES[key]
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` comments and blank lines are ignored."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def format_config(cfg: TrainConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.as_dict().items())


def resolve_config(path: str | Path | None = None, overrides: dict | None = None,
                   environ=None) -> TrainConfig:
    """Defaults, then the config file, then ``ETHPHISH_SEED``, then explicit overrides."""
    environ = os.environ if environ is None else environ
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text(encoding="utf-8")))
    if environ.get(SEED_ENV, "").strip():
        values["seed"] = _coerce("seed", environ[SEED_ENV])
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return TrainConfig(**values)
