"""One-factor parameter studies: sampling strategy, directivity, pooling, hidden size."""

from __future__ import annotations

import logging

from ..errors import ConfigError
from ..graph import TransactionGraph
from ..sampler import SamplingStrategy, build_dataset, compute_k
from .config import TrainConfig
from .metrics import METRIC_NAMES
from .training import cross_validate, prepare_all

log = logging.getLogger(__name__)

AXES = {
    "sampling": ["a-a", "a-t", "t-a", "t-t"],
    "directivity": ["undirected", "directed"],
    "pooling": ["average", "max"],
    "hidden_dim": [16, 32, 64, 128, 256],
}


def _apply(cfg: TrainConfig, axis: str, value) -> TrainConfig:
    if axis == "sampling":
        rank, weight = str(value).split("-")
        return cfg.replace(rank=rank, weight=weight)
    if axis == "directivity":
        return cfg.replace(direction=str(value))
    if axis == "pooling":
        return cfg.replace(pooling=str(value))
    return cfg.replace(hidden=int(value))


def run_experiment_grid(g: TransactionGraph, base_cfg: TrainConfig, axis: str,
                        values=None) -> list[dict]:
    """Full repeated cross-validation per axis value, everything else held at ``base_cfg``.

    Returns one row per value with the mean and standard deviation of each
    metric over all fold runs.
    """
    if axis not in AXES:
        raise ConfigError(f"axis must be one of {sorted(AXES)}, got {axis!r}")
    values = AXES[axis] if values is None else list(values)
    k = compute_k(g)
    prepared: dict[SamplingStrategy, list] = {}
    rows = []
    for value in values:
        cfg = _apply(base_cfg, axis, value)
        strategy = cfg.strategy
        if strategy not in prepared:
            data = build_dataset(g, strategy, seed=cfg.seed, k=k)
            prepared[strategy] = prepare_all(data, cfg)
        result = cross_validate(prepared[strategy], cfg)
        rep = result.report
        row = {"axis": axis, "value": value, "strategy": strategy.name, "k": k,
               "n_subgraphs": len(prepared[strategy]), "runs": len(rep.folds)}
        for name in METRIC_NAMES:
            row[f"{name}_mean"] = rep.mean[name]
            row[f"{name}_std"] = rep.std[name]
        log.info("%s=%s f1=%.4f±%.4f", axis, value, row["f1_mean"], row["f1_std"])
        rows.append(row)
    return rows
