"""Confusion counts and the four detection metrics, per run and aggregated."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

METRIC_NAMES = ("precision", "recall", "f1", "accuracy")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_predictions(cls, labels, predictions) -> "ConfusionCounts":
        y = np.asarray(labels).astype(bool)
        p = np.asarray(predictions).astype(bool)
        if y.shape != p.shape:
            raise ValueError("labels and predictions differ in shape")
        return cls(int(np.sum(y & p)), int(np.sum(~y & p)), int(np.sum(y & ~p)), int(np.sum(~y & ~p)))


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    accuracy: float
    undefined: tuple[str, ...] = ()

    @classmethod
    def from_counts(cls, c: ConfusionCounts) -> "Metrics":
        """Ratios with a zero denominator are reported as 0 and listed in ``undefined``."""
        undefined = []

        def ratio(num, den, name):
            if den == 0:
                undefined.append(name)
                return 0.0
            return num / den

        precision = ratio(c.tp, c.tp + c.fp, "precision")
        recall = ratio(c.tp, c.tp + c.fn, "recall")
        accuracy = ratio(c.tp + c.tn, c.total, "accuracy")
        if precision + recall == 0:
            undefined.append("f1")
            f1 = 0.0
        else:
            f1 = 2 * precision * recall / (precision + recall)
        return cls(precision, recall, f1, accuracy, tuple(undefined))

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1,
                "accuracy": self.accuracy, "undefined": list(self.undefined)}


@dataclass
class MetricsReport:
    """Per-fold metrics of a repeated cross-validation with their mean and standard deviation."""

    folds: list[Metrics] = field(default_factory=list)
    counts: list[ConfusionCounts] = field(default_factory=list)

    def add(self, counts: ConfusionCounts) -> Metrics:
        m = Metrics.from_counts(counts)
        self.counts.append(counts)
        self.folds.append(m)
        return m

    def values(self, name: str) -> np.ndarray:
        return np.array([getattr(m, name) for m in self.folds])

    @property
    def mean(self) -> dict[str, float]:
        return {n: float(self.values(n).mean()) for n in METRIC_NAMES}

    @property
    def std(self) -> dict[str, float]:
        return {n: float(self.values(n).std()) for n in METRIC_NAMES}


def summarize(reports: Sequence[MetricsReport]) -> MetricsReport:
    merged = MetricsReport()
    for r in reports:
        merged.folds.extend(r.folds)
        merged.counts.extend(r.counts)
    return merged
