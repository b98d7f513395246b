"""Shrinking a large transaction graph around labelled accounts.

Two stages: keep the one-hop neighbourhood of the seed accounts, then
random-walk from a seed until a requested number of accounts has been seen.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .errors import ConfigError, GraphError
from .graph import TransactionGraph, largest_wcc


@dataclass(frozen=True)
class RescaleConfig:
    target_scale: int
    rng_seed: int = 0
    start_node: str | None = None

    def __post_init__(self):
        if int(self.target_scale) < 2:
            raise ConfigError(f"target_scale must be >= 2, got {self.target_scale}")


def first_order_neighborhood(g: TransactionGraph, seeds: Iterable[str]) -> TransactionGraph:
    """Induced subgraph on the seeds plus every account adjacent to one (either direction)."""
    seed_idx = [i for i in {g.find(s) for s in seeds} if i is not None]
    if not seed_idx:
        raise GraphError("none of the seed accounts occur in the graph")
    is_seed = np.zeros(g.n_nodes, dtype=bool)
    is_seed[seed_idx] = True
    keep = is_seed.copy()
    keep[g.dst[is_seed[g.src]]] = True
    keep[g.src[is_seed[g.dst]]] = True
    return g.induced_subgraph(keep)


def random_walk_rescale(g: TransactionGraph, cfg: RescaleConfig) -> TransactionGraph:
    """Random-walk sample of exactly ``cfg.target_scale`` accounts.

    The walk moves to a uniformly chosen neighbour (in- and out-neighbours
    merged), revisits allowed; a node with no neighbours at all teleports to a
    uniformly chosen visited node. The start is ``cfg.start_node`` or else a
    random phishing account (a random account if none is labelled). The
    result is the induced subgraph on the visited set.
    """
    target = int(cfg.target_scale)
    n = g.n_nodes
    if target > n:
        raise GraphError(f"target_scale {target} exceeds graph size {n}")
    rng = np.random.default_rng(cfg.rng_seed)
    if cfg.start_node is not None:
        start = g.index_of(cfg.start_node)
    else:
        pool = np.flatnonzero(g.phishing)
        if len(pool) == 0:
            pool = np.arange(n)
        start = int(pool[rng.integers(len(pool))])

    labels = kernels.weak_component_labels(n, g.src, g.dst)
    reach = int(np.count_nonzero(labels == labels[start]))
    if reach < target:
        raise GraphError(f"start node's component has {reach} nodes, fewer than "
                         f"target_scale {target}; run largest_wcc first")

    indptr, nbr, _, _ = g.undirected
    visited = np.zeros(n, dtype=np.bool_)
    order = np.empty(target, dtype=np.int64)
    visited[start] = True
    order[0] = start
    count, current = 1, start
    chunk = max(1024, 4 * target)
    while count < target:
        draws = rng.random(chunk)
        count, current, _ = kernels.walk_steps(indptr, nbr, visited, order, count, current,
                                               target, draws)
    return g.induced_subgraph(visited)


def lighten(g: TransactionGraph, cfg: RescaleConfig | None,
            seeds: Iterable[str] | None = None) -> TransactionGraph:
    """One-hop extraction, largest WCC, then random-walk rescaling (skipped if ``cfg`` is None).

    ``seeds`` defaults to the graph's phishing-labelled accounts.
    """
    if seeds is None:
        seeds = [g.node_ids[i] for i in np.flatnonzero(g.phishing)]
    g = largest_wcc(first_order_neighborhood(g, seeds))
    if cfg is None:
        return g
    return random_walk_rescale(g, cfg)
