"""Adaptive top-k ego-subgraph sampling and labelled dataset assembly."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import container, kernels
from .errors import ConfigError, FormatError, GraphError
from .graph import ATTRIBUTES, TransactionGraph

DIRECTION_MODES = ("directed", "undirected")
N_FEATURES = 8
FEATURE_NAMES = (
    "in_degree", "out_degree", "in_count", "out_count",
    "log_in_amount", "log_out_amount", "n_neighbors", "is_center",
)


@dataclass(frozen=True)
class SamplingStrategy:
    rank_attribute: str = "t"
    weight_attribute: str = "t"
    hops: int = 2
    direction_mode: str = "undirected"

    def __post_init__(self):
        for name in (self.rank_attribute, self.weight_attribute):
            if name not in ATTRIBUTES:
                raise ConfigError(f"edge attribute must be one of {ATTRIBUTES}, got {name!r}")
        if self.direction_mode not in DIRECTION_MODES:
            raise ConfigError(f"direction_mode must be one of {DIRECTION_MODES}")
        if int(self.hops) < 1:
            raise ConfigError("hops must be positive")

    @property
    def name(self) -> str:
        """Dataset tag such as ``a-t`` (rank by amount, weight by count)."""
        return f"{self.rank_attribute}-{self.weight_attribute}"

    @classmethod
    def all_combinations(cls, **kwargs) -> list["SamplingStrategy"]:
        return [cls(r, w, **kwargs) for r in ATTRIBUTES for w in ATTRIBUTES]


@dataclass(eq=False)
class AccountSubgraph:
    """Ego-subgraph around one account.

    ``nodes`` maps local to global indices, the center is always local node 0.
    Edges are the directed graph edges among ``nodes`` as local ``(src, dst)``
    pairs with both raw attributes, whatever the sampling direction mode;
    ``directed`` records which mode chose the nodes.
    """

    center: int
    nodes: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    a: np.ndarray
    t: np.ndarray
    weight_attribute: str
    directed: bool
    label: int
    features: np.ndarray = field(default=None)

    center_index = 0

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @property
    def weights(self) -> np.ndarray:
        return self.a if self.weight_attribute == "a" else self.t.astype(np.float64)

    def permuted(self, perm: np.ndarray) -> "AccountSubgraph":
        """Same subgraph with local node ``i`` moved to position ``perm[i]``.

        The result no longer has its center at index 0; only used to check
        order invariance of downstream computations.
        """
        perm = np.asarray(perm)
        inv = np.argsort(perm)
        sub = AccountSubgraph(self.center, self.nodes[inv], perm[self.src], perm[self.dst],
                              self.a, self.t, self.weight_attribute, self.directed, self.label,
                              None if self.features is None else self.features[inv])
        return sub


def compute_k(g: TransactionGraph) -> int:
    """Neighbour budget ``ceil(avg_degree * (1 + density))`` in exact integer arithmetic."""
    v, e = g.n_nodes, g.n_edges
    return k_from_counts(v, e)


def k_from_counts(n_nodes: int, n_edges: int) -> int:
    v, e = int(n_nodes), int(n_edges)
    if v < 2:
        raise GraphError("compute_k needs at least two nodes")
    # (2e/v) * (1 + 2e/(v(v-1))) == 2e (v(v-1) + 2e) / (v^2 (v-1))
    num = 2 * e * (v * (v - 1) + 2 * e)
    den = v * v * (v - 1)
    return max(1, -(-num // den))


def _adjacency(g: TransactionGraph, direction_mode: str):
    if direction_mode == "undirected":
        return g.undirected
    return g.bidirectional


def _rank_arrays(adj, rank_attribute: str):
    _, _, a, t = adj
    return (a, t) if rank_attribute == "a" else (t, a)


def rank_neighbors(g: TransactionGraph, node: int, rank_attribute: str, k: int,
                   direction_mode: str = "undirected") -> np.ndarray:
    """Up to ``k`` neighbours of ``node``, best first.

    Ordering is by the rank attribute descending, then the other attribute
    descending, then neighbour index ascending. In undirected mode the two
    directions of a pair are summed; in directed mode each directed edge
    competes separately and a neighbour is reported once, at its best edge.
    """
    if not 0 <= node < g.n_nodes:
        raise GraphError(f"node {node} not in graph")
    if rank_attribute not in ATTRIBUTES:
        raise ConfigError(f"rank attribute must be one of {ATTRIBUTES}")
    adj = _adjacency(g, direction_mode)
    rank, tie = _rank_arrays(adj, rank_attribute)
    chosen = kernels.top_k_row(adj[0], adj[1], rank, tie, node, int(k))
    _, first = np.unique(chosen, return_index=True)
    return chosen[np.sort(first)]


class SubgraphExtractor:
    """Reusable extractor holding the ranked adjacency and scratch buffers for one graph."""

    def __init__(self, g: TransactionGraph, strategy: SamplingStrategy, k: int | None = None):
        self.g = g
        self.strategy = strategy
        self.k = compute_k(g) if k is None else int(k)
        self._adj = _adjacency(g, strategy.direction_mode)
        self._rank, self._tie = _rank_arrays(self._adj, strategy.rank_attribute)
        self._mark = np.zeros(g.n_nodes, dtype=np.int64)
        self._stamp = 0

    def node_set(self, center: int) -> np.ndarray:
        if not 0 <= center < self.g.n_nodes:
            raise GraphError(f"center {center} not in graph")
        self._stamp += 1
        return kernels.ego_expand(self._adj[0], self._adj[1], self._rank, self._tie,
                                  int(center), self.k, int(self.strategy.hops),
                                  self._mark, self._stamp)

    def extract(self, center: int, label: int | None = None) -> AccountSubgraph:
        g = self.g
        nodes = self.node_set(center)
        order = np.argsort(nodes)
        sorted_nodes = nodes[order]
        # gather out-edges of every member, keep those landing inside the set
        lo, hi = g.out_indptr[sorted_nodes], g.out_indptr[sorted_nodes + 1]
        counts = hi - lo
        eid = np.repeat(lo - np.cumsum(np.r_[0, counts[:-1]]), counts) + np.arange(counts.sum())
        dst_global = g.dst[eid]
        pos = np.searchsorted(sorted_nodes, dst_global)
        pos[pos == len(sorted_nodes)] = 0
        inside = sorted_nodes[pos] == dst_global
        eid = eid[inside]
        src_local = order[np.searchsorted(sorted_nodes, g.src[eid])]
        dst_local = order[pos[inside]]
        idx = np.lexsort((dst_local, src_local))
        src_local, dst_local = src_local[idx], dst_local[idx]
        a, t = g.a[eid][idx], g.t[eid][idx]
        directed = self.strategy.direction_mode == "directed"
        if label is None:
            label = int(g.phishing[center])
        sub = AccountSubgraph(int(center), nodes, src_local.astype(np.int64),
                              dst_local.astype(np.int64), a, t,
                              self.strategy.weight_attribute, directed, int(label))
        sub.features = node_features(sub)
        return sub


def extract_subgraph(g: TransactionGraph, center: int, strategy: SamplingStrategy,
                     k: int) -> AccountSubgraph:
    return SubgraphExtractor(g, strategy, k).extract(center)


def node_features(sub: AccountSubgraph) -> np.ndarray:
    """Per-node features from the subgraph's own directed edges (columns: ``FEATURE_NAMES``)."""
    n = sub.n_nodes
    src, dst = sub.src, sub.dst
    t = sub.t.astype(np.float64)
    x = np.zeros((n, N_FEATURES))
    x[:, 0] = np.bincount(dst, minlength=n)
    x[:, 1] = np.bincount(src, minlength=n)
    x[:, 2] = np.bincount(dst, weights=t, minlength=n)
    x[:, 3] = np.bincount(src, weights=t, minlength=n)
    x[:, 4] = np.log1p(np.bincount(dst, weights=sub.a, minlength=n))
    x[:, 5] = np.log1p(np.bincount(src, weights=sub.a, minlength=n))
    if len(src):
        pairs = np.unique(np.stack([np.r_[src, dst], np.r_[dst, src]]), axis=1)
        x[:, 6] = np.bincount(pairs[0], minlength=n)
    x[np.flatnonzero(sub.nodes == sub.center), 7] = 1.0
    return x


def build_dataset(g: TransactionGraph, strategy: SamplingStrategy, seed: int = 0,
                  k: int | None = None) -> list[AccountSubgraph]:
    """One subgraph per phishing account plus as many random unlabelled ones.

    Negatives are drawn without replacement from the unlabelled accounts.
    The result lists positives then negatives, each by ascending center index.
    """
    positives = np.flatnonzero(g.phishing)
    if len(positives) == 0:
        raise GraphError("graph has no phishing-labelled accounts")
    unlabeled = np.flatnonzero(~g.phishing)
    if len(unlabeled) < len(positives):
        raise GraphError(f"only {len(unlabeled)} unlabelled accounts for "
                         f"{len(positives)} negatives")
    rng = np.random.default_rng(seed)
    negatives = np.sort(rng.choice(unlabeled, size=len(positives), replace=False))
    ex = SubgraphExtractor(g, strategy, k)
    return ([ex.extract(int(c), 1) for c in positives]
            + [ex.extract(int(c), 0) for c in negatives])


# -- dataset files --------------------------------------------------------------

def save_dataset(path: str | Path, subgraphs: Sequence[AccountSubgraph],
                 strategy: SamplingStrategy, k: int, meta: dict | None = None) -> None:
    """Write subgraphs to a container; strategy and k go in the header."""
    header = {
        "strategy": strategy.name,
        "rank_attribute": strategy.rank_attribute,
        "weight_attribute": strategy.weight_attribute,
        "hops": strategy.hops,
        "direction_mode": strategy.direction_mode,
        "k": int(k),
        "n_subgraphs": len(subgraphs),
        "n_features": N_FEATURES,
        **(meta or {}),
    }
    node_off = np.zeros(len(subgraphs) + 1, dtype=np.int64)
    edge_off = np.zeros(len(subgraphs) + 1, dtype=np.int64)
    node_off[1:] = np.cumsum([s.n_nodes for s in subgraphs])
    edge_off[1:] = np.cumsum([s.n_edges for s in subgraphs])

    def cat(attr, dtype, empty_shape=(0,)):
        parts = [np.asarray(getattr(s, attr), dtype=dtype) for s in subgraphs]
        return np.concatenate(parts) if parts else np.zeros(empty_shape, dtype=dtype)

    container.write(path, "dataset", header, {
        "centers": np.array([s.center for s in subgraphs], dtype=np.int64),
        "labels": np.array([s.label for s in subgraphs], dtype=np.int64),
        "node_offsets": node_off,
        "edge_offsets": edge_off,
        "nodes": cat("nodes", np.int64),
        "src": cat("src", np.int64),
        "dst": cat("dst", np.int64),
        "a": cat("a", np.float64),
        "t": cat("t", np.int64),
        "features": cat("features", np.float64, (0, N_FEATURES)),
    })


def load_dataset(path: str | Path) -> tuple[list[AccountSubgraph], SamplingStrategy, dict]:
    meta, arr = container.read(path, "dataset")
    strategy = SamplingStrategy(meta["rank_attribute"], meta["weight_attribute"],
                                meta["hops"], meta["direction_mode"])
    no, eo = arr["node_offsets"], arr["edge_offsets"]
    if len(no) != meta["n_subgraphs"] + 1:
        raise FormatError("dataset header disagrees with payload")
    subs = []
    for i in range(meta["n_subgraphs"]):
        ns, es = slice(no[i], no[i + 1]), slice(eo[i], eo[i + 1])
        subs.append(AccountSubgraph(
            int(arr["centers"][i]), arr["nodes"][ns], arr["src"][es], arr["dst"][es],
            arr["a"][es], arr["t"][es], strategy.weight_attribute,
            strategy.direction_mode == "directed", int(arr["labels"][i]),
            arr["features"][ns]))
    return subs, strategy, meta
