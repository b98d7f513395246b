"""Machine-readable run reports and plain-text summaries."""

from __future__ import annotations

import json
from pathlib import Path

from .metrics import METRIC_NAMES
from .training import CVResult

_TABLE_ROWS = (("Precision", "precision"), ("Recall", "recall"),
               ("Accuracy", "accuracy"), ("F1-score", "f1"))


def cv_report(result: CVResult, extra: dict | None = None) -> dict:
    rep = result.report
    return {
        "config": result.config.as_dict(),
        "folds": [
            {"repeat": r.repeat, "fold": r.fold,
             "tp": r.counts.tp, "fp": r.counts.fp, "fn": r.counts.fn, "tn": r.counts.tn,
             "final_loss": r.final_loss, **r.metrics.as_dict()}
            for r in result.records
        ],
        "aggregate": {"mean": rep.mean, "std": rep.std, "runs": len(rep.folds)},
        **(extra or {}),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def summary_table(aggregate: dict, label: str = "model") -> str:
    """Metric rows x one column, values as ``mean ± std``."""
    width = max(len(label), 17)
    lines = [f"{'Metric':<10} {label:>{width}}"]
    for title, key in _TABLE_ROWS:
        cell = f"{aggregate['mean'][key]:.4f} ± {aggregate['std'][key]:.4f}"
        lines.append(f"{title:<10} {cell:>{width}}")
    return "\n".join(lines) + "\n"


def grid_table(rows: list[dict]) -> str:
    if not rows:
        return ""
    axis = rows[0]["axis"]
    header = f"{axis:<12}" + "".join(f"{name:>20}" for name in METRIC_NAMES)
    lines = [header]
    for row in rows:
        cells = "".join(f"{row[f'{n}_mean']:.4f} ± {row[f'{n}_std']:.4f}".rjust(20)
                        for n in METRIC_NAMES)
        lines.append(f"{str(row['value']):<12}{cells}")
    return "\n".join(lines) + "\n"
