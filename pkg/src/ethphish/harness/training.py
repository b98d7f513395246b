"""Mini-batch training, evaluation and repeated stratified cross-validation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ConfigError
from ..nn import Adam, Batch, ChebNetClassifier, PreparedGraph, prepare
from ..sampler import N_FEATURES, AccountSubgraph
from .config import TrainConfig
from .metrics import ConfusionCounts, Metrics, MetricsReport

log = logging.getLogger(__name__)


def derive_seed(*parts: int) -> int:
    """Stable 32-bit sub-seed for a (seed, repeat, fold, ...) tuple."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def stratified_kfold(labels, folds: int = 5, repeats: int = 1,
                     seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """``repeats * folds`` (train, test) index pairs with class proportions kept per fold."""
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if len(classes) < 2:
        raise ConfigError("stratified k-fold needs both classes present")
    for c in classes:
        if np.sum(labels == c) < folds:
            raise ConfigError(f"class {c} has {np.sum(labels == c)} members, fewer than {folds} folds")
    splits = []
    for r in range(repeats):
        rng = np.random.default_rng(derive_seed(seed, r))
        fold_members = [[] for _ in range(folds)]
        for c in classes:
            members = rng.permutation(np.flatnonzero(labels == c))
            for f, chunk in enumerate(np.array_split(members, folds)):
                fold_members[f].append(chunk)
        fold_idx = [np.sort(np.concatenate(m)) for m in fold_members]
        for f in range(folds):
            train = np.sort(np.concatenate([fold_idx[j] for j in range(folds) if j != f]))
            splits.append((train, fold_idx[f]))
    return splits


def prepare_all(subgraphs: Sequence[AccountSubgraph], cfg: TrainConfig) -> list[PreparedGraph]:
    return [prepare(s, cfg.amount_transform) for s in subgraphs]


def _as_prepared(data, cfg) -> list[PreparedGraph]:
    data = list(data)
    if data and isinstance(data[0], AccountSubgraph):
        return prepare_all(data, cfg)
    return data


@dataclass
class TrainResult:
    model: ChebNetClassifier
    loss_history: list[float] = field(default_factory=list)


def train(dataset, cfg: TrainConfig, seed: int | None = None) -> TrainResult:
    """Fit a fresh model with Adam on shuffled mini-batches.

    ``dataset`` holds ``AccountSubgraph`` or already prepared graphs. The loss
    history has one entry per epoch (mean of batch losses).
    """
    graphs = _as_prepared(dataset, cfg)
    if not graphs:
        raise ConfigError("cannot train on an empty dataset")
    seed = cfg.seed if seed is None else seed
    model = ChebNetClassifier(N_FEATURES, cfg.hidden, cfg.cheb_order, cfg.pooling, seed)
    if cfg.standardize:
        model.fit_scaler(graphs)
    opt = Adam(lr=cfg.lr)
    rng = np.random.default_rng(derive_seed(seed, 0x5EED))
    n = len(graphs)
    history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, cfg.batch_size):
            batch = Batch.from_graphs([graphs[i] for i in order[start:start + cfg.batch_size]])
            losses.append(model.loss(batch))
            opt.step(model.parameters(), model.backward())
        history.append(float(np.mean(losses)))
        if log.isEnabledFor(logging.DEBUG) and (epoch + 1) % 20 == 0:
            log.debug("epoch %d loss %.6f", epoch + 1, history[-1])
    return TrainResult(model, history)


@dataclass
class Evaluation:
    counts: ConfusionCounts
    metrics: Metrics
    probabilities: np.ndarray


def evaluate(model: ChebNetClassifier, test, threshold: float = 0.5,
             cfg: TrainConfig | None = None) -> Evaluation:
    """Predict phishing iff P(phishing) >= threshold and score against the labels."""
    graphs = _as_prepared(test, cfg or TrainConfig())
    if not graphs:
        raise ConfigError("cannot evaluate on an empty test set")
    probs = model.predict_proba(graphs)
    labels = np.array([g.label for g in graphs])
    counts = ConfusionCounts.from_predictions(labels, probs >= threshold)
    return Evaluation(counts, Metrics.from_counts(counts), probs)


@dataclass
class FoldRecord:
    repeat: int
    fold: int
    counts: ConfusionCounts
    metrics: Metrics
    final_loss: float


@dataclass
class CVResult:
    config: TrainConfig
    records: list[FoldRecord]

    @property
    def report(self) -> MetricsReport:
        rep = MetricsReport()
        for r in self.records:
            rep.add(r.counts)
        return rep


def cross_validate(dataset, cfg: TrainConfig) -> CVResult:
    """Repeated stratified k-fold: train on k-1 folds, evaluate on the held-out one."""
    graphs = _as_prepared(dataset, cfg)
    labels = np.array([g.label for g in graphs])
    splits = stratified_kfold(labels, cfg.folds, cfg.repeats, cfg.seed)
    records = []
    for i, (tr, te) in enumerate(splits):
        repeat, fold = divmod(i, cfg.folds)
        result = train([graphs[j] for j in tr], cfg, seed=derive_seed(cfg.seed, repeat, fold))
        ev = evaluate(result.model, [graphs[j] for j in te], cfg.threshold)
        log.info("repeat %d fold %d: f1=%.4f acc=%.4f", repeat, fold, ev.metrics.f1,
                 ev.metrics.accuracy)
        records.append(FoldRecord(repeat, fold, ev.counts, ev.metrics, result.loss_history[-1]))
    return CVResult(cfg, records)
