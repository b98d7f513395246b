from .config import SEED_ENV, TrainConfig, parse_config_text, resolve_config
from .experiments import AXES, run_experiment_grid
from .metrics import ConfusionCounts, Metrics, MetricsReport
from .training import (CVResult, Evaluation, TrainResult, cross_validate, evaluate,
                       stratified_kfold, train)

__all__ = [
    "AXES", "SEED_ENV", "CVResult", "ConfusionCounts", "Evaluation", "Metrics", "MetricsReport",
    "TrainConfig", "TrainResult", "cross_validate", "evaluate", "parse_config_text",
    "resolve_config", "run_experiment_grid", "stratified_kfold", "train",
]
